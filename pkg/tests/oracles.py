"""Independent reference computations used by the tests.

Nothing here calls into ``ncmoments``; each oracle takes a different route
(brute force, convex solver, dense grid) to the quantity under test.
"""
from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import least_squares, minimize


# -- spectral calculus ---------------------------------------------------------

def abs_power_eig(A, p):
    """``(A^* A)^{p/2}`` straight from ``eigh`` of ``A^* A``."""
    G = A.conj().T @ A
    w, W = np.linalg.eigh(0.5 * (G + G.conj().T))
    return (W * np.clip(w, 0, None) ** (p / 2)) @ W.conj().T


def moment_oracle(D, A, p):
    n = A.shape[0]
    m = np.trace(D @ A)
    return float(np.trace(D @ abs_power_eig(A - m * np.eye(n), p)).real)


def vector_moment(A, x, p):
    x = x / np.linalg.norm(x)
    return moment_oracle(np.outer(x, x.conj()), A, p)


def power_iteration_norm(A, iters=2000, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(A.shape[1]) + 1j * rng.standard_normal(A.shape[1])
    G = A.conj().T @ A
    for _ in range(iters):
        x = G @ x
        x /= np.linalg.norm(x)
    return math.sqrt(float(np.vdot(x, G @ x).real))


# -- geometry ----------------------------------------------------------------------

def enclosing_circle_bruteforce(points, tol=1e-12):
    """O(m^4) enumeration of every 2- and 3-point candidate circle."""
    z = np.asarray(points, dtype=complex)
    if z.size == 1:
        return complex(z[0]), 0.0
    best = (None, math.inf)

    def consider(c, r):
        nonlocal best
        if r < best[1] and np.all(np.abs(z - c) <= r + tol * max(1.0, r)):
            best = (c, r)

    for a, b in itertools.combinations(z, 2):
        consider((a + b) / 2, abs(a - b) / 2)
    for a, b, c in itertools.combinations(z, 3):
        d = 2 * (a.real * (b.imag - c.imag) + b.real * (c.imag - a.imag)
                 + c.real * (a.imag - b.imag))
        if abs(d) < 1e-14:
            continue
        ux = (abs(a) ** 2 * (b.imag - c.imag) + abs(b) ** 2 * (c.imag - a.imag)
              + abs(c) ** 2 * (a.imag - b.imag)) / d
        uy = (abs(a) ** 2 * (c.real - b.real) + abs(b) ** 2 * (a.real - c.real)
              + abs(c) ** 2 * (b.real - a.real)) / d
        center = complex(ux, uy)
        consider(center, abs(a - center))
    return best


def chebyshev_cvxpy(A):
    """``min_lambda ||A - lambda I||`` as a convex program."""
    import cvxpy as cp

    n = A.shape[0]
    lam = cp.Variable(complex=True)
    prob = cp.Problem(cp.Minimize(cp.sigma_max(A - lam * np.eye(n))))
    prob.solve()
    return complex(lam.value), float(prob.value)


def chebyshev_scipy(A):
    """Same quantity by multi-start BFGS-free Powell search on ``R^2``."""
    n = A.shape[0]
    f = lambda v: np.linalg.norm(A - complex(v[0], v[1]) * np.eye(n), 2)
    starts = [np.trace(A) / n, 0j] + list(np.linalg.eigvals(A))
    best = min((minimize(f, [s.real, s.imag], method="Powell",
                         options={"xtol": 1e-12, "ftol": 1e-15, "maxfev": 20000})
                for s in starts), key=lambda r: r.fun)
    return complex(best.x[0], best.x[1]), float(best.fun)


# -- Bloch sphere (n = 2) ---------------------------------------------------------

def bloch_vector(theta, phi):
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


def bloch_coords(x):
    """Real Bloch vector of the projection onto ``x``."""
    x = x / np.linalg.norm(x)
    P = np.outer(x, x.conj())
    return np.array([2 * P[0, 1].real, 2 * P[1, 0].imag, (P[0, 0] - P[1, 1]).real])


def fibonacci_sphere(m):
    k = np.arange(m) + 0.5
    theta = np.arccos(1 - 2 * k / m)
    phi = (np.pi * (1 + 5 ** 0.5) * k) % (2 * np.pi)
    return theta, phi


def batched_vector_moments(A, X, p):
    """Moments at many unit vectors (rows of ``X``) with one batched ``eigh``."""
    n = A.shape[0]
    m = np.einsum("ki,ij,kj->k", X.conj(), A, X)
    B = A[None] - m[:, None, None] * np.eye(n)[None]
    K = np.conj(np.swapaxes(B, 1, 2)) @ B
    w, W = np.linalg.eigh(0.5 * (K + np.conj(np.swapaxes(K, 1, 2))))
    y = np.einsum("kji,kj->ki", W.conj(), X)
    return np.sum(np.clip(w, 0, None) ** (p / 2) * np.abs(y) ** 2, axis=1)


def bloch_grid_max(A, p, m=10_000, polish=8):
    """Max over rank-one states of the p-th central moment for a 2x2 ``A``."""
    theta, phi = fibonacci_sphere(m)
    X = np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=1)
    vals = batched_vector_moments(A, X, p)
    best = -math.inf
    for i in np.argsort(vals)[-polish:]:
        res = minimize(lambda v: -vector_moment(A, bloch_vector(v[0], v[1]), p),
                       [theta[i], phi[i]], method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000})
        best = max(best, -res.fun, vals[i])
    return best


def bloch_feasible_points(constraints, grid=300, keep=12):
    """Rank-one projections on the 2x2 Bloch sphere with ``Tr[P B_i] = a_i``.

    Dense (theta, phi) grid scan of the residual, then least-squares polish of
    the best candidates; returns distinct Bloch vectors of the solutions.
    """
    th = np.linspace(0, np.pi, grid)
    ph = np.linspace(0, 2 * np.pi, 2 * grid, endpoint=False)
    T, F = np.meshgrid(th, ph, indexing="ij")
    x0 = np.cos(T / 2)
    x1 = np.exp(1j * F) * np.sin(T / 2)
    resid = np.zeros_like(T)
    for B, a in constraints:
        v = (B[0, 0] * x0 * x0 + B[0, 1] * x0 * x1 + B[1, 0] * np.conj(x1) * x0
             + B[1, 1] * np.abs(x1) ** 2).real
        resid += (v - a) ** 2

    def res_fn(v):
        x = bloch_vector(v[0], v[1])
        return [float(np.vdot(x, B @ x).real) - a for B, a in constraints]

    flat = np.argsort(resid, axis=None)[: keep * 20]
    sols = []
    for idx in flat:
        i, j = np.unravel_index(idx, T.shape)
        r = least_squares(res_fn, [T[i, j], F[i, j]], xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if np.max(np.abs(r.fun)) > 1e-9:
            continue
        b = bloch_coords(bloch_vector(*r.x))
        if all(np.linalg.norm(b - s) > 1e-7 for s in sols):
            sols.append(b)
        if len(sols) >= keep:
            break
    return sols


# -- scalar problems ------------------------------------------------------------

def bernoulli_grid(p, m=1_000_001):
    t = np.linspace(0.0, 1.0, m)
    f = t ** p * (1 - t) + t * (1 - t) ** p
    i = int(np.argmax(f))
    # refine around the best grid node with a bounded scalar search
    from scipy.optimize import minimize_scalar

    lo, hi = t[max(i - 1, 0)], t[min(i + 1, m - 1)]
    r = minimize_scalar(lambda s: -(s ** p * (1 - s) + s * (1 - s) ** p),
                        bounds=(lo, hi), method="bounded", options={"xatol": 1e-14})
    return max(float(f[i]), float(-r.fun))


def lemma1_slsqp(starts=200, seed=0):
    """Multi-start SLSQP on the augmented four-variable problem."""
    rng = np.random.default_rng(seed)
    obj = lambda x: -(2 * x[0] ** 2 * x[2] - 2 * x[0] * x[3] + x[1] ** 2)
    cons = [
        {"type": "ineq", "fun": lambda x: x[1] - x[2]},
        {"type": "ineq", "fun": lambda x: x[1] * x[2] - abs(x[3])},
        {"type": "ineq", "fun": lambda x: x[3] + math.sqrt(max((1 - x[1] ** 2)
                                                                * (x[1] ** 2 - x[2] ** 2), 0.0)) - x[0]},
    ]
    bounds = [(0, 1), (0, 1), (0, 1), (-1, 1)]
    best = -math.inf
    for _ in range(starts):
        x2 = rng.uniform()
        x3 = rng.uniform(0, x2)
        x0 = [0.0, x2, x3, 0.0]
        r = minimize(obj, x0, method="SLSQP", bounds=bounds, constraints=cons,
                     options={"ftol": 1e-14, "maxiter": 500})
        if r.success:
            best = max(best, -r.fun)
    return best
