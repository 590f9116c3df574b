"""Dilations and decompositions that turn general matrices into nicer ones."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .geometry import smallest_enclosing_circle
from .linalg import (DEFAULT_TOL, Density, MatrixError, ToleranceConfig,
                     adjoint, as_matrix, density_matrix, is_normal,
                     is_partial_isometry, operator_norm, psd_sqrt, svd)


@dataclass
class DilationPair:
    original: np.ndarray
    dilated: np.ndarray
    kind: str
    extras: dict = field(default_factory=dict)


def _require_contraction(A, tol, normalize):
    nrm = operator_norm(A)
    if nrm > 1.0 + tol.contraction:
        if not normalize:
            raise MatrixError(f"expected a contraction, ||A|| = {nrm!r}")
        return A / nrm, nrm
    return A, 1.0


def halmos_dilation(A, *, normalize: bool = False,
                    tol: ToleranceConfig = DEFAULT_TOL) -> DilationPair:
    """``[[A, (I - A A^*)^(1/2)], [0, 0]]``, a partial isometry of size 2n.

    With ``normalize=True`` a non-contraction is first divided by its norm;
    the factor used is returned in ``extras["scale"]``.
    """
    A = as_matrix(A)
    A, s = _require_contraction(A, tol, normalize)
    n = A.shape[0]
    V = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    V[:n, :n] = A
    V[:n, n:] = psd_sqrt(np.eye(n) - A @ adjoint(A))
    ok, res = is_partial_isometry(V, tol.partial_isometry)
    if not ok:
        raise MatrixError(f"dilation is not a partial isometry (residual {res:.3e})")
    return DilationPair(A, V, "partial_isometry", {"scale": s, "residual": res})


def embed_density(D, n_target: Optional[int] = None) -> Density:
    """``D (+) 0`` in dimension ``n_target`` (default ``2n``)."""
    Dm = density_matrix(D)
    n = Dm.shape[0]
    return Density(Dm).embed(2 * n if n_target is None else n_target)


def dilation_gap_block(D, A) -> np.ndarray:
    """``(A - m)^* (I - A A^*) (A - m)`` with ``m = Tr[DA]``.

    This is the extra term picked up by the top-left block of the fourth power
    of the dilated matrix; it is positive semidefinite for a contraction.
    """
    Dm = density_matrix(D)
    A = as_matrix(A)
    n = A.shape[0]
    C = A - np.trace(Dm @ A) * np.eye(n)
    return adjoint(C) @ (np.eye(n) - A @ adjoint(A)) @ C


def unitary_mean(A, *, normalize: bool = False, tol: ToleranceConfig = DEFAULT_TOL):
    """Unitaries ``U1, U2`` with ``(U1 + U2) / 2 = A`` for a contraction ``A``.

    From ``A = W S X^*``: ``U_pm = W (S +- i (I - S^2)^(1/2)) X^*``.
    """
    A = as_matrix(A)
    A, _ = _require_contraction(A, tol, normalize)
    W, s, X = svd(A)
    s = np.minimum(s, 1.0)
    c = np.sqrt(np.clip(1.0 - s * s, 0.0, None))
    U1 = (W * (s + 1j * c)) @ adjoint(X)
    U2 = (W * (s - 1j * c)) @ adjoint(X)
    return U1, U2


@dataclass
class Doubling:
    """Diagonal doubled pair in the eigenbasis of a normal matrix."""

    a_tilde: np.ndarray
    h_tilde: np.ndarray
    eigenvalues: np.ndarray
    transition: np.ndarray
    center: complex


def normal_doubling(A, *, center: bool = False,
                    tol: ToleranceConfig = DEFAULT_TOL) -> Doubling:
    """``diag(l, -conj(l))`` and ``diag(|l|, -|l|)`` for the eigenvalues ``l`` of ``A``.

    ``transition`` is the unitary ``Z`` with ``A = Z diag(l) Z^*``.  With
    ``center=True`` the spectrum is first translated so that its smallest
    enclosing circle is centred at 0 (``center`` in the result records the
    shift); only then do the two doubled matrices share a Chebyshev radius.
    """
    A = as_matrix(A)
    if not is_normal(A, tol.normality):
        raise MatrixError("normal_doubling needs a normal matrix")
    T, Z = scipy.linalg.schur(A, output="complex")
    lam = np.diag(T).copy()
    shift = 0j
    if center:
        shift = smallest_enclosing_circle(lam).center
        lam = lam - shift
    a_tilde = np.diag(np.concatenate([lam, -np.conj(lam)]))
    h_tilde = np.diag(np.concatenate([np.abs(lam), -np.abs(lam)])).astype(np.complex128)
    return Doubling(a_tilde, h_tilde, lam, Z, complex(shift))
