"""Planar geometry of spectra: spread, enclosing circles, Chebyshev radius."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .linalg import as_matrix, eig_general, operator_norm

SQRT3 = float(np.sqrt(3.0))


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def contains(self, z, tol: float = 1e-12) -> bool:
        z = np.asarray(z, dtype=np.complex128)
        return bool(np.all(np.abs(z - self.center) <= self.radius + tol))


@dataclass(frozen=True)
class SpreadResult:
    value: float
    witness: tuple


@dataclass(frozen=True)
class ChebyshevResult:
    lambda_star: complex
    radius: float
    evaluations: int = 0


def spread(A) -> SpreadResult:
    """Largest modulus of a difference of two eigenvalues."""
    lam = eig_general(A)
    d = np.abs(lam[:, None] - lam[None, :])
    i, j = np.unravel_index(int(np.argmax(d)), d.shape)
    return SpreadResult(float(d[i, j]), (complex(lam[i]), complex(lam[j])))


def smallest_enclosing_circle(points, seed: Optional[int] = 0) -> Circle:
    """Minimal disk containing ``points`` (randomised Welzl, move-to-front).

    The input order is shuffled with ``numpy.random.default_rng(seed)`` first,
    so a fixed seed gives a fixed result.
    """
    z = np.asarray(points, dtype=np.complex128).reshape(-1)
    if z.size == 0:
        raise ValueError("smallest_enclosing_circle needs at least one point")
    if not np.all(np.isfinite(z)):
        raise ValueError("points must be finite")
    order = np.random.default_rng(seed).permutation(z.size)
    xs = np.ascontiguousarray(z.real[order])
    ys = np.ascontiguousarray(z.imag[order])
    cx, cy, r = kernels.welzl_circle(xs, ys)
    return Circle(complex(cx, cy), float(r))


def support_points(points, circle: Circle, rel_tol: float = 1e-9) -> np.ndarray:
    """Points lying on the boundary of ``circle``."""
    z = np.asarray(points, dtype=np.complex128).reshape(-1)
    gap = np.abs(np.abs(z - circle.center) - circle.radius)
    return z[gap <= rel_tol * max(1.0, circle.radius)]


def jung_check(points, tol: float = 1e-10):
    """``(radius, diameter, holds)`` for the planar Jung bound ``r <= d / sqrt 3``."""
    z = np.asarray(points, dtype=np.complex128).reshape(-1)
    if z.size < 2:
        raise ValueError("jung_check needs at least two points")
    radius = smallest_enclosing_circle(z).radius
    diameter = float(np.max(np.abs(z[:, None] - z[None, :])))
    return radius, diameter, radius <= diameter / SQRT3 + tol


def chebyshev_radius(A, *, rounds: int = 8, max_evals: int = 4000,
                     xtol: float = 1e-13) -> ChebyshevResult:
    """``min_lambda ||A - lambda I||`` by Nelder-Mead over the complex plane.

    ``lambda -> ||A - lambda I||`` is convex, so every local minimum is
    global.  Three coarse runs start from the centre of the eigenvalue circle,
    ``Tr A / n`` and 0; the best is then restarted with a shrinking simplex
    until a round improves by less than ``1e-10``.
    """
    M = as_matrix(A)
    n = M.shape[0]
    tau = complex(np.trace(M) / n)
    scale = operator_norm(M - tau * np.eye(n))
    if scale == 0.0:
        return ChebyshevResult(tau, 0.0, 0)
    seeds = [smallest_enclosing_circle(eig_general(M)).center, tau, 0j]
    ftol = 1e-15 * scale
    best = None
    evals = 0
    for s in seeds:
        x, y, f, e = kernels.nelder_mead_sigma(M, s.real, s.imag, 0.25 * scale,
                                               1e-7 * scale, 1e-9 * scale, max_evals)
        evals += e
        if best is None or f < best[2]:
            best = (x, y, f)
    step = 1e-5 * scale
    for _ in range(rounds):
        x, y, f, e = kernels.nelder_mead_sigma(M, best[0], best[1], step,
                                               xtol * scale, ftol, max_evals)
        evals += e
        gain = best[2] - f
        if f < best[2]:
            best = (x, y, f)
        if gain < 1e-10 * max(1.0, scale) and step < 1e-8 * scale:
            break
        step *= 0.1
    return ChebyshevResult(complex(best[0], best[1]), float(best[2]), evals)
