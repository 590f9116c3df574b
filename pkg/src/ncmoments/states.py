"""Extreme states of moment spectrahedra and rank-one moment maximisation.

The rank reduction walks from a feasible density to an extreme point of the
set ``{X >= 0 : Tr X = 1, Tr[X B_i] = alpha_i}``.  Extreme points of that set
have rank at most ``sqrt(k + 1)`` for ``k`` constraints, so with the two
constraints produced by :func:`build_moment_spectrahedron` the walk ends at a
rank-one projection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from . import kernels
from .linalg import (DEFAULT_TOL, Density, MatrixError, RankOneProjection,
                     ToleranceConfig, abs_power, adjoint, as_hermitian,
                     as_matrix, density_matrix)
from .moments import MomentValue, central_moment


class ReductionError(RuntimeError):
    """Rank reduction could not proceed (infeasible start or no null direction)."""


@dataclass
class Spectrahedron:
    """Densities ``X`` with ``Tr[X B_i] = alpha_i``; unit trace is implicit."""

    dim: int
    constraints: List[Tuple[np.ndarray, float]]
    witness: Optional[np.ndarray] = None

    def __post_init__(self):
        checked = []
        for B, alpha in self.constraints:
            B = as_hermitian(B)
            if B.shape != (self.dim, self.dim):
                raise MatrixError(f"constraint has shape {B.shape}, expected {self.dim}")
            checked.append((B, float(alpha)))
        self.constraints = checked

    @property
    def k(self) -> int:
        return len(self.constraints)

    def residuals(self, X) -> np.ndarray:
        """``[Tr X - 1, Tr[X B_1] - alpha_1, ...]``."""
        Xm = density_matrix(X)
        out = [float(np.trace(Xm).real) - 1.0]
        for B, alpha in self.constraints:
            out.append(float(np.real(np.vdot(B, Xm))) - alpha)
        return np.array(out)

    def max_residual(self, X) -> float:
        return float(np.max(np.abs(self.residuals(X))))


@dataclass(frozen=True)
class RankStep:
    rank_before: int
    direction_norm: float
    step_length: float
    rank_after: int
    max_residual: float


@dataclass
class ReductionTrace:
    steps: List[RankStep] = field(default_factory=list)
    final_rank: int = 0

    def to_dict(self):
        return {"final_rank": self.final_rank,
                "steps": [vars(s) for s in self.steps]}


def _factor(D, floor: float) -> np.ndarray:
    w, U = np.linalg.eigh(D)
    cut = max(D.shape[0] * np.finfo(float).eps * max(w[-1], 0.0), floor)
    keep = w > cut
    return U[:, keep] * np.sqrt(w[keep])


def _hermitian_basis_system(Cs, r):
    """Rows ``Tr[C Delta_b]`` for a real basis ``Delta_b`` of r x r Hermitian matrices.

    Basis order: ``E_jj``; then for ``j < l``: ``E_jl + E_lj`` and
    ``i (E_jl - E_lj)``.
    """
    iu, ju = np.triu_indices(r, 1)
    rows = []
    for C in Cs:
        off = C[iu, ju]
        rows.append(np.concatenate([np.real(np.diag(C)), 2.0 * off.real, 2.0 * off.imag]))
    return np.array(rows)


def _direction_from_coeffs(coef, r):
    iu, ju = np.triu_indices(r, 1)
    m = iu.size
    Delta = np.diag(coef[:r]).astype(np.complex128)
    z = coef[r:r + m] + 1j * coef[r + m:]
    # E_jl + E_lj has (j,l) = 1; i(E_jl - E_lj) has (j,l) = i
    Delta[iu, ju] = z
    Delta[ju, iu] = np.conj(z)
    return Delta


def rank_reduce(D, S: Spectrahedron, tol: ToleranceConfig = DEFAULT_TOL):
    """Move ``D`` to an extreme point of ``S`` of rank ``<= floor(sqrt(k + 1))``.

    Writes ``D = R R^*`` and, while ``r^2 > k + 1``, picks a Hermitian ``Delta``
    with ``Tr[R^* B R Delta] = 0`` for ``B`` in ``{I, B_1, ..., B_k}``, then
    steps to ``R (I + t Delta) R^*`` with the smallest ``|t|`` that makes
    ``I + t Delta`` singular.  Every constraint value is unchanged along the
    way.  Returns ``(Density, ReductionTrace)``.
    """
    Dm = as_hermitian(density_matrix(D), tol)
    scale = 1.0 + max((float(np.max(np.abs(B))) for B, _ in S.constraints), default=0.0)
    res0 = S.max_residual(Dm)
    if res0 > tol.feasibility * scale:
        raise ReductionError(f"start point is infeasible (residual {res0:.3e})")
    trace = ReductionTrace()
    R = _factor(Dm, tol.rank_floor)
    r = R.shape[1]
    mats = [np.eye(S.dim, dtype=np.complex128)] + [B for B, _ in S.constraints]
    while r * r > S.k + 1:
        Cs = [adjoint(R) @ B @ R for B in mats]
        system = _hermitian_basis_system(Cs, r)
        _, sv, Vt = np.linalg.svd(system)
        coef = Vt[-1]
        pivot = int(np.argmax(np.abs(coef) > 0.5 * np.max(np.abs(coef))))
        if coef[pivot] < 0:
            coef = -coef
        Delta = _direction_from_coeffs(coef, r)
        mu, W = np.linalg.eigh(Delta)
        if mu[-1] <= 0.0 or mu[0] >= 0.0:
            raise ReductionError(
                f"no admissible direction at rank {r} (eigenvalues of direction "
                f"{mu[0]:.3e}..{mu[-1]:.3e}); rank cutoff may be too tight")
        t_neg, t_pos = -1.0 / mu[-1], -1.0 / mu[0]
        t = t_neg if abs(t_neg) <= abs(t_pos) else t_pos
        lam = 1.0 + t * mu
        keep = lam > 1e-12 * float(np.max(lam))
        R = (R @ W[:, keep]) * np.sqrt(lam[keep])
        r_new = R.shape[1]
        if r_new >= r:
            raise ReductionError(f"rank did not drop at rank {r}")
        res = S.max_residual(R @ adjoint(R))
        trace.steps.append(RankStep(r, float(np.linalg.norm(Delta)), float(t), r_new, res))
        r = r_new
    out = R @ adjoint(R)
    out = 0.5 * (out + adjoint(out))
    res = S.max_residual(out)
    if res > tol.feasibility * scale:
        raise ReductionError(f"reduced state drifted off the constraints ({res:.3e})")
    trace.final_rank = r
    return Density(out), trace


def build_moment_spectrahedron(D, A, p: float):
    """Two-constraint set whose extreme points carry the same p-th moment data.

    ``A`` is rotated by ``exp(i theta)``, ``theta = -arg Tr[DA]``, so that
    ``alpha = Tr[D A_rot]`` is real and non-negative.  Constraints are
    ``B_1 = |A_rot - alpha I|^p`` (value ``Tr[D B_1]``) and
    ``B_2 = (A_rot + A_rot^*) / 2`` (value ``alpha``).
    Returns ``(Spectrahedron, A_rot)``.
    """
    Dm = density_matrix(D)
    Am = as_matrix(A)
    n = Am.shape[0]
    mean = complex(np.trace(Dm @ Am))
    theta = 0.0 if abs(mean) < 1e-14 else -math.atan2(mean.imag, mean.real)
    rot = np.exp(1j * theta) * Am
    alpha = float(np.real(np.trace(Dm @ rot)))
    B1 = abs_power(rot - alpha * np.eye(n), p)
    B2 = 0.5 * (rot + adjoint(rot))
    a1 = float(np.real(np.vdot(B1, Dm)))
    S = Spectrahedron(n, [(B1, a1), (B2, alpha)], witness=Dm)
    return S, rot


@dataclass
class ProjectionReduction:
    projection: RankOneProjection
    trace: ReductionTrace
    spectrahedron: Spectrahedron
    rotated: np.ndarray
    constraint_residuals: np.ndarray
    moment_density: MomentValue
    moment_projection: MomentValue

    @property
    def moment_gap(self) -> float:
        return abs(self.moment_projection.raw - self.moment_density.raw)

    @property
    def moment_match(self) -> bool:
        return self.moment_gap <= 1e-6

    def to_dict(self):
        v = self.projection.vector
        return {
            "vector": [{"re": float(z.real), "im": float(z.imag)} for z in v],
            "constraint_residuals": [float(x) for x in self.constraint_residuals],
            "rank_steps": self.trace.to_dict(),
            "moment_density": self.moment_density.raw,
            "moment_projection": self.moment_projection.raw,
            "moment_match": self.moment_match,
        }


def reduce_to_projection(D, A, p: float,
                         tol: ToleranceConfig = DEFAULT_TOL) -> ProjectionReduction:
    """Rank-one projection sharing the constrained moment data of ``D``.

    Both spectrahedron constraints are matched by construction.  The constraint
    set fixes only ``Re Tr[P A_rot]``, so the full central moment of ``P`` can
    differ from that of ``D``; the gap is reported, not enforced.
    """
    S, rot = build_moment_spectrahedron(D, A, p)
    Dr, trace = rank_reduce(S.witness, S, tol)
    w, U = Dr.eigen
    x = U[:, -1] * math.sqrt(max(w[-1], 0.0))
    P = RankOneProjection.from_vector(x, normalize=True)
    return ProjectionReduction(
        projection=P,
        trace=trace,
        spectrahedron=S,
        rotated=rot,
        constraint_residuals=S.residuals(P.matrix)[1:],
        moment_density=central_moment(D, A, p),
        moment_projection=central_moment(P, A, p),
    )


# -- maximisation over rank-one states ------------------------------------------

def rank_one_moment(A, x, p: float) -> float:
    """``<x, |A - <x, A x>|^p x>`` for a unit vector ``x``."""
    return central_moment(np.outer(x, np.conj(x)), A, p).raw


def _value_grad(A, x, p):
    # Daleckii-Krein derivative of K -> K^(p/2) at K = M^* M, M = A - <x,Ax> I
    n = A.shape[0]
    Ax = A @ x
    m = np.vdot(x, Ax)
    M = A - m * np.eye(n)
    K = adjoint(M) @ M
    w, W = np.linalg.eigh(0.5 * (K + adjoint(K)))
    w = np.clip(w, 0.0, None)
    h = w ** (0.5 * p)
    y = adjoint(W) @ x
    val = float(np.sum(h * np.abs(y) ** 2))
    dw = w[:, None] - w[None, :]
    dh = h[:, None] - h[None, :]
    wm = 0.5 * (w[:, None] + w[None, :])
    close = np.abs(dw) <= 1e-10 * max(1.0, float(w[-1]))
    gamma = np.where(close, 0.5 * p * wm ** (0.5 * p - 1.0), dh / np.where(close, 1.0, dw))
    Z = W @ (gamma * np.outer(y, np.conj(y))) @ adjoint(W)
    c = np.trace(Z @ adjoint(M))
    g = W @ (h * y) - (c * Ax + np.conj(c) * (adjoint(A) @ x))
    return val, g


def _value_grad_fd(A, x, p, h=1e-6):
    val = rank_one_moment(A, x, p)
    n = x.size
    g = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        for unit, part in ((1.0, "re"), (1j, "im")):
            e = np.zeros(n, dtype=np.complex128)
            e[i] = unit * h
            xp = (x + e) / np.linalg.norm(x + e)
            xm = (x - e) / np.linalg.norm(x - e)
            d = (rank_one_moment(A, xp, p) - rank_one_moment(A, xm, p)) / (2 * h)
            g[i] += 0.5 * d if part == "re" else 0.5j * d
    return val, g


def moment_value_grad(A, x, p: float):
    """Value and gradient (``df = 2 Re(g^* dx)``) of the rank-one moment at ``x``."""
    A = as_matrix(A)
    x = np.asarray(x, dtype=np.complex128)
    if p == round(p) and int(p) % 2 == 0:
        return kernels.even_moment_value_grad(A, x, int(p) // 2)
    if p >= 2.0:
        return _value_grad(A, x, p)
    return _value_grad_fd(A, x, p)


def _ascend(A, x0, p, max_iter, tol):
    x = x0 / np.linalg.norm(x0)
    f, g = moment_value_grad(A, x, p)
    step = 1.0 / max(1.0, float(np.linalg.norm(g)))
    for it in range(1, max_iter + 1):
        gt = g - np.vdot(x, g).real * x
        gn = float(np.linalg.norm(gt))
        if gn == 0.0:
            break
        accepted = False
        while step * gn > 1e-16:
            xn = x + step * gt
            xn /= np.linalg.norm(xn)
            fn, gnew = moment_value_grad(A, xn, p)
            if fn > f:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        gain = fn - f
        x, f, g = xn, fn, gnew
        step *= 1.5
        if gain < tol:
            break
    return f, x, it


@dataclass(frozen=True)
class MuResult:
    value: float
    argmax: RankOneProjection
    restarts: int
    p: float

    def to_dict(self):
        return {"p": self.p, "value": self.value, "restarts": self.restarts,
                "argmax": [{"re": float(z.real), "im": float(z.imag)}
                           for z in self.argmax.vector]}


def mu_p(A, p: float, restarts: int = 64, seed: int = 0,
         max_iter: int = 5000, tol: float = 1e-12) -> MuResult:
    """Largest p-th central moment of ``A`` over all states.

    The maximum over densities is attained at a rank-one projection, so the
    search runs over unit vectors: ``restarts`` random starts (one independent
    stream per start, split from ``seed``), each followed by projected
    gradient ascent on the sphere that stops once a step gains less than
    ``tol``.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    A = as_matrix(A)
    n = A.shape[0]
    even = p == round(p) and int(p) % 2 == 0
    best_val, best_x = -np.inf, None
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        x0 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        if even:
            val, x, _ = kernels.even_moment_ascent(A, x0, int(p) // 2, max_iter, tol)
        else:
            val, x, _ = _ascend(A, x0, p, max_iter, tol)
        if val > best_val:
            best_val, best_x = val, x
    best_x = best_x / np.linalg.norm(best_x)
    return MuResult(float(best_val), RankOneProjection(best_x), restarts, float(p))
