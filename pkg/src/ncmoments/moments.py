"""Central moments of a matrix under a state, and Bernoulli moment constants."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import chebyshev_radius
from .linalg import (DEFAULT_TOL, MatrixError, ToleranceConfig, abs_power,
                     as_matrix, density_matrix)

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class MomentValue:
    """``raw = Tr[D |A - mean|^p]`` with ``mean = Tr[D A]``; ``root = raw^(1/p)``."""

    p: float
    raw: float
    root: float
    mean: complex

    def to_dict(self):
        return {"p": self.p, "raw": self.raw, "root": self.root,
                "mean": {"re": self.mean.real, "im": self.mean.imag}}


@dataclass(frozen=True)
class BernoulliConstant:
    """Largest p-th central moment of a Bernoulli variable and where it sits."""

    p: float
    b_p: float
    argmax_t: float

    @property
    def root(self) -> float:
        return self.b_p ** (1.0 / self.p)


def central_moment(D, A, p: float, tol: ToleranceConfig = DEFAULT_TOL) -> MomentValue:
    """``Tr[D |A - Tr(DA) I|^p]`` for a density ``D``.

    ``D`` may be a :class:`~ncmoments.linalg.Density`, a
    :class:`~ncmoments.linalg.RankOneProjection` or an array.  Values down to
    ``-tol.moment_clamp`` are rounding noise and clamp to zero; anything more
    negative raises.
    """
    if p < 1:
        raise ValueError(f"moment exponent must be >= 1, got {p}")
    Dm = density_matrix(D)
    Am = as_matrix(A)
    if Dm.shape != Am.shape:
        raise MatrixError(f"dimension mismatch: density {Dm.shape} vs matrix {Am.shape}")
    mean = complex(np.trace(Dm @ Am))
    n = Am.shape[0]
    B = abs_power(Am - mean * np.eye(n), p)
    raw = float(np.real(np.trace(Dm @ B)))
    if raw < 0.0:
        if raw < -tol.moment_clamp * max(1.0, float(np.max(np.abs(B)))):
            raise ArithmeticError(f"negative central moment {raw:.3e}; is D positive?")
        raw = 0.0
    return MomentValue(float(p), raw, raw ** (1.0 / p), mean)


def tracial_central_moment(A, p: float) -> MomentValue:
    """Central moment under the normalised trace ``Tr(.)/n``."""
    n = as_matrix(A).shape[0]
    return central_moment(np.eye(n) / n, A, p)


def _bernoulli_f(t: float, p: float) -> float:
    return t ** p * (1.0 - t) + t * (1.0 - t) ** p


def _golden_max(f, a: float, b: float, tol: float = 1e-12, max_iter: int = 200) -> float:
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


@lru_cache(maxsize=256)
def bernoulli_b(p: float) -> BernoulliConstant:
    """``b_p = max_{t in [0,1]} t^p (1-t) + t (1-t)^p``.

    Closed forms: ``2^-p`` at ``t = 1/2`` for ``1 <= p <= 2`` and ``1/12``
    for ``p = 4``.  Otherwise the maximiser is searched on ``[0, 1/2]`` (the
    function is symmetric about 1/2): a coarse grid locates the peak, golden
    section refines it.
    """
    p = float(p)
    if p < 1:
        raise ValueError(f"b_p is defined for p >= 1, got {p}")
    if p <= 2.0:
        return BernoulliConstant(p, 2.0 ** -p, 0.5)
    if p == 4.0:
        # t(1-t) = 1/6
        return BernoulliConstant(p, 1.0 / 12.0, 0.5 * (1.0 - 1.0 / math.sqrt(3.0)))
    f = lambda t: _bernoulli_f(t, p)  # noqa: E731
    grid = np.linspace(0.0, 0.5, 2001)
    vals = grid ** p * (1.0 - grid) + grid * (1.0 - grid) ** p
    k = int(np.argmax(vals))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid.size - 1)]
    t = _golden_max(f, lo, hi)
    return BernoulliConstant(p, f(t), t)


def moment_report(D, A, p_list, *, radius=None):
    """Moments for each exponent together with the applicable Chebyshev bounds.

    For ``p <= 2`` the root is compared with the Chebyshev radius ``r``; for
    ``p == 4`` the raw moment is compared with ``(4/3) r^4``.
    """
    if radius is None:
        radius = chebyshev_radius(A).radius
    rows = []
    for p in p_list:
        m = central_moment(D, A, p)
        row = {"moment": m.to_dict(), "radius": radius}
        if p <= 2.0:
            row["bound_root_le_radius"] = m.root <= radius + 1e-10
        if p == 4.0:
            row["bound_fourth"] = (4.0 / 3.0) * radius ** 4
            row["bound_fourth_holds"] = m.raw <= row["bound_fourth"] + 1e-8
        rows.append(row)
    return rows
