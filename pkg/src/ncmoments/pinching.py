"""Pinchings (conditional expectations onto block-diagonal subalgebras)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .linalg import (DEFAULT_TOL, MatrixError, ToleranceConfig, abs_power,
                     adjoint, as_matrix)


@dataclass(frozen=True, eq=False)
class Partition:
    """Disjoint index blocks covering ``0..n-1``, optionally in a rotated basis.

    ``basis`` (columns) is the orthonormal basis the blocks refer to; ``None``
    means the standard basis.
    """

    blocks: Tuple[Tuple[int, ...], ...]
    n: int
    basis: Optional[np.ndarray] = None

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence[int]], n: Optional[int] = None,
                    basis=None, tol: ToleranceConfig = DEFAULT_TOL) -> "Partition":
        blocks = tuple(tuple(int(i) for i in b) for b in blocks if len(b))
        flat = [i for b in blocks for i in b]
        size = len(flat) if n is None else n
        if sorted(flat) != list(range(size)):
            raise MatrixError(f"blocks {blocks} do not partition 0..{size - 1}")
        if basis is not None:
            basis = orthonormalize(basis, tol)
            if basis.shape[0] != size:
                raise MatrixError("basis dimension does not match the blocks")
        return cls(blocks, size, basis)

    @classmethod
    def from_basis(cls, vectors, tol: ToleranceConfig = DEFAULT_TOL) -> "Partition":
        """Rank-one blocks along the given orthonormal basis (columns)."""
        U = orthonormalize(vectors, tol)
        n = U.shape[0]
        return cls(tuple((i,) for i in range(n)), n, U)

    @classmethod
    def parse(cls, spec: str, n: int) -> "Partition":
        """Parse ``"1,2|3,4"`` (1-based indices, ``|`` between blocks)."""
        try:
            blocks = [[int(tok) - 1 for tok in part.split(",") if tok.strip()]
                      for part in spec.split("|")]
        except ValueError as exc:
            raise MatrixError(f"cannot parse blocks {spec!r}: {exc}") from None
        return cls.from_blocks(blocks, n)

    def projections(self):
        U = np.eye(self.n, dtype=np.complex128) if self.basis is None else self.basis
        for b in self.blocks:
            cols = U[:, list(b)]
            yield cols @ adjoint(cols)


def orthonormalize(vectors, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Check orthonormality of the columns, repairing small defects.

    Residuals up to ``tol.orthonormal`` pass untouched; up to
    ``tol.orthonormal_repair`` are fixed by two modified Gram-Schmidt passes;
    anything larger raises.
    """
    U = np.array(vectors, dtype=np.complex128)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise MatrixError(f"basis must be a square array of column vectors, got {U.shape}")
    res = float(np.max(np.abs(adjoint(U) @ U - np.eye(U.shape[0]))))
    if res <= tol.orthonormal:
        return U
    if res > tol.orthonormal_repair:
        raise MatrixError(f"basis is not orthonormal (residual {res:.3e})")
    for _ in range(2):
        for j in range(U.shape[1]):
            for i in range(j):
                U[:, j] -= np.vdot(U[:, i], U[:, j]) * U[:, i]
            U[:, j] /= np.linalg.norm(U[:, j])
    return U


def conditional_expectation(A, part: Partition) -> np.ndarray:
    """``sum_i P_i A P_i`` over the blocks of ``part``."""
    A = as_matrix(A)
    if A.shape[0] != part.n:
        raise MatrixError(f"partition is for n={part.n}, matrix has n={A.shape[0]}")
    if part.basis is None:
        out = np.zeros_like(A)
        for b in part.blocks:
            idx = np.ix_(b, b)
            out[idx] = A[idx]
        return out
    U = part.basis
    inner = conditional_expectation(adjoint(U) @ A @ U, Partition(part.blocks, part.n))
    return U @ inner @ adjoint(U)


def pinch_by_conjugation(A, part: Partition) -> np.ndarray:
    """Pinching as an average of unitary conjugates.

    With ``m`` blocks and ``S_k = sum_j w^(jk) P_j`` (``w`` a primitive m-th
    root of unity), ``(1/m) sum_k S_k^* A S_k`` equals the pinching exactly.
    For two blocks this is the average of ``A`` and ``S A S`` with
    ``S = diag(I, -I)``.
    """
    A = as_matrix(A)
    Ps = list(part.projections())
    m = len(Ps)
    w = np.exp(2j * np.pi / m)
    out = np.zeros_like(A)
    for k in range(m):
        S = sum(w ** (j * k) * P for j, P in enumerate(Ps))
        out += adjoint(S) @ A @ S
    return out / m


def pinching_contractivity_check(A, part: Partition, p: float, tol: float = 1e-9):
    """``(Tr|E(A)|^p, Tr|A|^p, holds)``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    A = as_matrix(A)
    E = conditional_expectation(A, part)
    lhs = float(np.trace(abs_power(E, p)).real)
    rhs = float(np.trace(abs_power(A, p)).real)
    return lhs, rhs, lhs <= rhs + tol


def diagonal_moment(A, basis=None, p: float = 2.0,
                    tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """p-th dispersion of the diagonal entries ``<A e_i, e_i>``.

    ``(1/n sum_i |d_i - mean(d)|^p)^(1/p)``.  ``basis`` is a :class:`Partition`
    built from a basis, an array of basis columns, or ``None`` for the
    standard basis.
    """
    A = as_matrix(A)
    if isinstance(basis, Partition):
        U = basis.basis
    elif basis is None:
        U = None
    else:
        U = orthonormalize(basis, tol)
    d = np.diag(A) if U is None else np.einsum("ji,jk,ki->i", np.conj(U), A, U)
    dev = np.abs(d - d.mean())
    return float(np.mean(dev ** p) ** (1.0 / p))
