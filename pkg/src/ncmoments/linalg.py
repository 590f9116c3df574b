"""Dense complex matrix helpers: validation, spectral calculus, norms.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.  The
small value types below (:class:`Density`, :class:`RankOneProjection`) wrap
an array together with the checks that make it one.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels


class MatrixError(ValueError):
    """Input matrix violates a structural requirement."""


class ConvergenceError(np.linalg.LinAlgError):
    """An iterative decomposition hit its iteration cap.

    ``partial`` holds whatever intermediate form was reached (for the QR
    eigensolver: the partial Schur form) and ``residual`` a size measure of
    the unconverged part.
    """

    def __init__(self, message, partial=None, residual=float("nan")):
        super().__init__(message)
        self.partial = partial
        self.residual = residual


@dataclass(frozen=True)
class ToleranceConfig:
    """Every numerical threshold used by the package, in one place."""

    hermitian: float = 1e-12
    psd: float = 1e-10
    trace: float = 1e-10
    unit: float = 1e-12
    moment_clamp: float = 1e-12
    feasibility: float = 1e-8
    rank_floor: float = 1e-10
    contraction: float = 1e-10
    normality: float = 1e-8
    orthonormal: float = 1e-10
    orthonormal_repair: float = 1e-6
    partial_isometry: float = 1e-8
    slack: float = 1e-8

    def with_overrides(self, overrides):
        """Return a copy with ``overrides`` applied; unknown names raise ``KeyError``."""
        names = {f.name for f in dataclasses.fields(self)}
        unknown = sorted(set(overrides) - names)
        if unknown:
            raise KeyError(f"unknown tolerance name(s): {', '.join(unknown)}")
        return dataclasses.replace(self, **{k: float(v) for k, v in overrides.items()})


DEFAULT_TOL = ToleranceConfig()


# -- validation ---------------------------------------------------------------

def as_matrix(A) -> np.ndarray:
    """Validate and convert to a square, finite ``complex128`` array."""
    M = np.array(A, dtype=np.complex128, copy=True)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise MatrixError(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise MatrixError("matrix has non-finite entries")
    return M


def adjoint(A):
    return np.conj(A).T


def hermitian_residual(A) -> float:
    return float(np.max(np.abs(A - adjoint(A)), initial=0.0))


def as_hermitian(H, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Validate Hermitian symmetry (relative to the largest entry) and symmetrise."""
    M = as_matrix(H)
    scale = max(1.0, float(np.max(np.abs(M))))
    res = hermitian_residual(M)
    if res > tol.hermitian * scale:
        raise MatrixError(f"matrix is not Hermitian (max |M - M*| = {res:.3e})")
    return 0.5 * (M + adjoint(M))


def identity_like(A):
    return np.eye(A.shape[0], dtype=np.complex128)


# -- decompositions ----------------------------------------------------------

def eig_hermitian(H, tol: ToleranceConfig = DEFAULT_TOL):
    """Ascending eigenvalues and unitary modal matrix of a Hermitian matrix."""
    M = as_hermitian(H, tol)
    w, U = np.linalg.eigh(M)
    scale = 1.0 + float(np.max(np.abs(w), initial=0.0))
    res = float(np.linalg.norm((U * w) @ adjoint(U) - M, 2))
    if res > 1e-9 * scale:
        raise ConvergenceError(f"Hermitian eigendecomposition residual {res:.3e}",
                               partial=(w, U), residual=res)
    return w, U


def eig_general(A) -> np.ndarray:
    """Eigenvalues of an arbitrary square matrix via Hessenberg + shifted QR.

    Iteration cap is ``100 n`` QR sweeps.  On failure a :class:`ConvergenceError`
    carrying the partial Schur form is raised.
    """
    M = as_matrix(A)
    n = M.shape[0]
    T, ok, _ = kernels.hqr_eigvals(M, 100 * n)
    if not ok:
        sub = np.abs(np.diag(T, -1))
        raise ConvergenceError(f"QR iteration did not converge in {100 * n} sweeps",
                               partial=T, residual=float(sub.max(initial=0.0)))
    return np.diag(T).copy()


def svd(A):
    """``A = U diag(s) V^*`` with ``s`` descending.  Returns ``(U, s, V)``."""
    M = as_matrix(A)
    U, s, Vh = np.linalg.svd(M)
    return U, s, adjoint(Vh)


def abs_power(A, p: float) -> np.ndarray:
    """``|A|^p = (A^* A)^{p/2}`` by spectral calculus on ``A^* A``.

    The eigenvectors of ``A^* A`` and the square roots of its eigenvalues are
    taken from the SVD ``A = U S V^*`` (``A^* A = V S^2 V^*``).  Squaring first
    and rooting afterwards would cost about ``sqrt(eps)`` relative accuracy on
    small singular values whenever ``p`` is not an even integer.
    """
    if p < 1:
        raise ValueError(f"exponent must be >= 1, got {p}")
    _, s, V = svd(A)
    out = (V * s ** p) @ adjoint(V)
    return 0.5 * (out + adjoint(out))


def psd_sqrt(H) -> np.ndarray:
    """Square root of a (numerically) positive semidefinite Hermitian matrix."""
    M = as_matrix(H)
    w, W = np.linalg.eigh(0.5 * (M + adjoint(M)))
    out = (W * np.sqrt(np.clip(w, 0.0, None))) @ adjoint(W)
    return 0.5 * (out + adjoint(out))


def operator_norm(A) -> float:
    return float(np.linalg.norm(as_matrix(A), 2))


def schatten_norm(A, p: float) -> float:
    """``(sum_i s_i^p)^{1/p}``; ``p = inf`` gives the operator norm."""
    if p < 1:
        raise ValueError(f"Schatten exponent must be >= 1, got {p}")
    s = np.linalg.svd(as_matrix(A), compute_uv=False)
    if np.isinf(p):
        return float(s[0])
    top = s[0]
    if top == 0.0:
        return 0.0
    # factor out s_max so large p does not overflow
    return float(top * np.sum((s / top) ** p) ** (1.0 / p))


def polar(A):
    """Polar decomposition ``A = U P`` with ``U`` unitary and ``P = |A|``.

    On ``ker A`` the unitary factor is completed from the SVD; the completion
    is the unitary part of the map ``ker A -> (ran A)^perp`` given by the
    product of the two orthogonal projections, so it reduces to the identity
    whenever the two subspaces coincide.
    """
    W, s, X = svd(A)
    scale = s[0] if s.size else 0.0
    r = int(np.sum(s > max(s.size * np.finfo(float).eps * scale, 1e-300)))
    U = W[:, :r] @ adjoint(X[:, :r])
    if r < s.size:
        W0, X0 = W[:, r:], X[:, r:]
        Wc, _, Xc = np.linalg.svd(adjoint(W0) @ X0)
        U = U + W0 @ (Wc @ Xc) @ adjoint(X0)
    P = (X * s) @ adjoint(X)
    return U, 0.5 * (P + adjoint(P))


def is_partial_isometry(V, tol: float = 1e-8):
    """``(ok, residual)`` with ``residual = ||V V* V - V||``."""
    M = as_matrix(V)
    res = float(np.linalg.norm(M @ adjoint(M) @ M - M, 2))
    return res <= tol, res


def is_normal(A, tol: float = 1e-8) -> bool:
    M = as_matrix(A)
    scale = max(1.0, operator_norm(M) ** 2)
    return float(np.linalg.norm(adjoint(M) @ M - M @ adjoint(M), 2)) <= tol * scale


# -- states ---------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Density:
    """Positive semidefinite, unit-trace matrix."""

    matrix: np.ndarray

    @classmethod
    def from_matrix(cls, D, tol: ToleranceConfig = DEFAULT_TOL) -> "Density":
        M = as_hermitian(D, tol)
        w = np.linalg.eigvalsh(M)
        if w[0] < -tol.psd:
            raise MatrixError(f"density has negative eigenvalue {w[0]:.3e}")
        tr = float(np.trace(M).real)
        if abs(tr - 1.0) > tol.trace:
            raise MatrixError(f"density trace is {tr!r}, expected 1")
        return cls(M)

    @classmethod
    def maximally_mixed(cls, n: int) -> "Density":
        return cls(np.eye(n, dtype=np.complex128) / n)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def eigen(self):
        """Ascending eigenvalues and eigenvectors (cached)."""
        return np.linalg.eigh(self.matrix)

    def rank(self, floor: float = DEFAULT_TOL.rank_floor) -> int:
        w = self.eigen[0]
        cut = max(self.n * np.finfo(float).eps * max(w[-1], 0.0), floor)
        return int(np.sum(w > cut))

    def embed(self, n_target: int) -> "Density":
        if n_target < self.n:
            raise MatrixError("cannot embed into a smaller dimension")
        out = np.zeros((n_target, n_target), dtype=np.complex128)
        out[: self.n, : self.n] = self.matrix
        return Density(out)


@dataclass(frozen=True, eq=False)
class RankOneProjection:
    """``P = x x^*`` for a unit vector ``x``."""

    vector: np.ndarray

    @classmethod
    def from_vector(cls, x, normalize: bool = False,
                    tol: ToleranceConfig = DEFAULT_TOL) -> "RankOneProjection":
        v = np.asarray(x, dtype=np.complex128).reshape(-1)
        nrm = float(np.linalg.norm(v))
        if normalize:
            if nrm == 0.0:
                raise MatrixError("zero vector cannot be normalised")
            v = v / nrm
        elif abs(nrm - 1.0) > tol.unit:
            raise MatrixError(f"projection vector has norm {nrm!r}")
        return cls(v)

    @property
    def n(self) -> int:
        return self.vector.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return np.outer(self.vector, self.vector.conj())

    def as_density(self) -> Density:
        return Density(self.matrix)


def density_matrix(D) -> np.ndarray:
    """Matrix of a :class:`Density`, :class:`RankOneProjection` or raw array."""
    if isinstance(D, (Density, RankOneProjection)):
        return D.matrix
    return as_matrix(D)
