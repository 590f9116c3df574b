"""Seeded random matrix ensembles.

All randomness comes from numpy's counter-based ``Philox`` bit generator.  A
stream is addressed by a tuple of non-negative integers (user seed, suite,
dimension, trial, ...) fed through ``SeedSequence``, so any trial can be
regenerated on its own and serial and parallel runs draw identical samples.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (Density, MatrixError, RankOneProjection, adjoint,
                     is_normal, is_partial_isometry, operator_norm)

KINDS = ("general", "hermitian", "normal", "unitary", "partial_isometry",
         "contraction", "density", "rank_one_density")

_CHECK_TOL = 1e-10


def stream(*keys: int) -> np.random.Generator:
    """Independent Philox generator addressed by integer keys."""
    ss = np.random.SeedSequence([int(k) & 0xFFFFFFFFFFFFFFFF for k in keys])
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str
    dim: int
    seed: int = 0


def ginibre(rng, n: int) -> np.ndarray:
    """Complex Gaussian matrix with ``E|g_ij|^2 = 1``."""
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)


def haar_unitary(rng, n: int) -> np.ndarray:
    Q, R = np.linalg.qr(ginibre(rng, n))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def unit_vector(rng, n: int) -> np.ndarray:
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return x / np.linalg.norm(x)


def _sample(kind, n, rng):
    if kind == "general":
        return ginibre(rng, n)
    if kind == "hermitian":
        G = ginibre(rng, n)
        return 0.5 * (G + adjoint(G))
    if kind == "unitary":
        return haar_unitary(rng, n)
    if kind == "normal":
        U = haar_unitary(rng, n)
        z = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
        return (U * z) @ adjoint(U)
    if kind == "partial_isometry":
        U = haar_unitary(rng, n)
        r = int(rng.integers(1, n + 1))
        B = haar_unitary(rng, n)[:, :r]
        return U @ (B @ adjoint(B))
    if kind == "contraction":
        G = ginibre(rng, n)
        return G * (rng.uniform(0.1, 1.0) / operator_norm(G))
    if kind == "density":
        G = ginibre(rng, n)
        W = G @ adjoint(G)
        return Density(0.5 * (W + adjoint(W)) / np.trace(W).real)
    if kind == "rank_one_density":
        return RankOneProjection(unit_vector(rng, n))
    raise ValueError(f"unknown ensemble kind {kind!r}; expected one of {KINDS}")


def _check(kind, X):
    if kind in ("density", "rank_one_density"):
        M = X.matrix
        w = np.linalg.eigvalsh(M)
        bad = w[0] < -_CHECK_TOL or abs(np.trace(M).real - 1.0) > _CHECK_TOL
        if kind == "rank_one_density":
            bad = bad or abs(np.linalg.norm(X.vector) - 1.0) > _CHECK_TOL
        return not bad
    if kind == "hermitian":
        return np.max(np.abs(X - adjoint(X))) <= _CHECK_TOL
    if kind == "unitary":
        return np.max(np.abs(adjoint(X) @ X - np.eye(X.shape[0]))) <= _CHECK_TOL
    if kind == "normal":
        return is_normal(X, _CHECK_TOL)
    if kind == "partial_isometry":
        return is_partial_isometry(X, _CHECK_TOL)[0]
    if kind == "contraction":
        return operator_norm(X) <= 1.0 + _CHECK_TOL
    return bool(np.all(np.isfinite(X)))


def draw(kind: str, n: int, rng: np.random.Generator):
    """One validated sample of ``kind`` in dimension ``n`` from ``rng``."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    X = _sample(kind, n, rng)
    if not _check(kind, X):
        raise MatrixError(f"{kind} sample failed its defining property")
    return X


def generate(spec: EnsembleSpec):
    """Deterministic sample for ``spec`` (matrix, Density or RankOneProjection)."""
    return draw(spec.kind, spec.dim, stream(spec.seed))
