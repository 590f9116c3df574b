"""Hot numeric loops.

Every function here is decorated with :func:`ncmoments._accel.kernel`, which
compiles it with numba unless ``NCMOMENTS_DISABLE_NUMBA`` is set.  Only scalar
and ndarray arguments are used so the same code runs either way.
"""
import cmath
import math

import numpy as np

from ._accel import kernel

_EPS = 2.220446049250313e-16


# --------------------------------------------------------------------------
# Nonsymmetric eigenvalues: Householder Hessenberg reduction + shifted QR
# --------------------------------------------------------------------------

@kernel
def hessenberg(A):
    """Unitary similarity to upper Hessenberg form (Householder reflections)."""
    H = A.copy()
    n = H.shape[0]
    for k in range(n - 2):
        x = H[k + 1:, k].copy()
        alpha = math.sqrt(np.sum(x.real ** 2 + x.imag ** 2))
        if alpha == 0.0:
            continue
        ax0 = abs(x[0])
        phase = x[0] / ax0 if ax0 > 0.0 else 1.0 + 0.0j
        v = x.copy()
        v[0] += phase * alpha
        vnorm = math.sqrt(np.sum(v.real ** 2 + v.imag ** 2))
        v = v / vnorm
        vc = v.conj()
        m = n - k - 1
        # left: rows k+1.., cols k..
        for j in range(k, n):
            s = 0.0 + 0.0j
            for i in range(m):
                s += vc[i] * H[k + 1 + i, j]
            for i in range(m):
                H[k + 1 + i, j] -= 2.0 * v[i] * s
        # right: all rows, cols k+1..
        for i in range(n):
            s = 0.0 + 0.0j
            for j in range(m):
                s += H[i, k + 1 + j] * v[j]
            for j in range(m):
                H[i, k + 1 + j] -= 2.0 * s * vc[j]
        for i in range(k + 2, n):
            H[i, k] = 0.0
    return H


@kernel
def _givens(x, y):
    # returns (c, s, r) with [[c, s], [-conj(s), c]] @ [x, y] = [r, 0]
    ax = abs(x)
    ay = abs(y)
    if ay == 0.0:
        return 1.0, 0.0 + 0.0j, x
    if ax == 0.0:
        return 0.0, y.conjugate() / ay, ay + 0.0j
    nrm = math.hypot(ax, ay)
    ph = x / ax
    return ax / nrm, ph * y.conjugate() / nrm, ph * nrm


@kernel
def hqr_eigvals(A, max_sweeps):
    """Eigenvalues of a general complex matrix.

    Returns ``(T, converged, sweeps)`` where ``T`` is the (partial) Schur form;
    its diagonal holds the eigenvalues once ``converged`` is true.
    """
    n = A.shape[0]
    H = hessenberg(A)
    if n == 1:
        return H, True, 0
    hnorm = 0.0
    for i in range(n):
        for j in range(n):
            hnorm = max(hnorm, abs(H[i, j]))
    if hnorm == 0.0:
        return H, True, 0
    cs = np.zeros(n, dtype=np.float64)
    ss = np.zeros(n, dtype=np.complex128)
    hi = n - 1
    its = 0
    sweeps = 0
    while hi > 0:
        lo = hi
        while lo > 0:
            scale = abs(H[lo - 1, lo - 1]) + abs(H[lo, lo])
            if scale == 0.0:
                scale = hnorm
            if abs(H[lo, lo - 1]) <= _EPS * scale:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            its = 0
            continue
        if sweeps >= max_sweeps:
            return H, False, sweeps
        a = H[hi - 1, hi - 1]
        b = H[hi - 1, hi]
        c = H[hi, hi - 1]
        d = H[hi, hi]
        if its > 0 and its % 10 == 0:
            mu = d + 0.75 * abs(c) * (1.0 + 0.5j)
        else:
            half = 0.5 * (a - d)
            disc = cmath.sqrt(half * half + b * c)
            mu1 = 0.5 * (a + d) + disc
            mu2 = 0.5 * (a + d) - disc
            mu = mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2
        for i in range(lo, hi + 1):
            H[i, i] -= mu
        for k in range(lo, hi):
            c_, s_, r_ = _givens(H[k, k], H[k + 1, k])
            cs[k] = c_
            ss[k] = s_
            H[k, k] = r_
            H[k + 1, k] = 0.0
            for j in range(k + 1, n):
                t1 = H[k, j]
                t2 = H[k + 1, j]
                H[k, j] = c_ * t1 + s_ * t2
                H[k + 1, j] = -s_.conjugate() * t1 + c_ * t2
        for k in range(lo, hi):
            c_ = cs[k]
            s_ = ss[k]
            top = min(k + 2, hi)
            for i in range(0, top + 1):
                t1 = H[i, k]
                t2 = H[i, k + 1]
                H[i, k] = c_ * t1 + s_.conjugate() * t2
                H[i, k + 1] = -s_ * t1 + c_ * t2
        for i in range(lo, hi + 1):
            H[i, i] += mu
        its += 1
        sweeps += 1
    return H, True, sweeps


# --------------------------------------------------------------------------
# Chebyshev radius: Nelder-Mead on lambda -> sigma_max(A - lambda I)
# --------------------------------------------------------------------------

@kernel
def sigma_max_shifted(A, re, im):
    n = A.shape[0]
    M = A.copy()
    lam = re + 1j * im
    for i in range(n):
        M[i, i] -= lam
    G = M.conj().T @ M
    w = np.linalg.eigvalsh(G)
    return math.sqrt(max(w[-1], 0.0))


@kernel
def nelder_mead_sigma(A, x0, y0, step, xtol, ftol, max_evals):
    """Minimise sigma_max(A - (x + iy) I) from a right-angle simplex.

    Returns ``(x, y, fbest, evals)``.
    """
    px = np.array([x0, x0 + step, x0])
    py = np.array([y0, y0, y0 + step])
    fv = np.empty(3)
    for i in range(3):
        fv[i] = sigma_max_shifted(A, px[i], py[i])
    evals = 3
    while evals < max_evals:
        order = np.argsort(fv)
        px = px[order]
        py = py[order]
        fv = fv[order]
        diam = max(math.hypot(px[1] - px[0], py[1] - py[0]),
                   math.hypot(px[2] - px[0], py[2] - py[0]))
        if diam <= xtol and fv[2] - fv[0] <= ftol:
            break
        cx = 0.5 * (px[0] + px[1])
        cy = 0.5 * (py[0] + py[1])
        rx = cx + (cx - px[2])
        ry = cy + (cy - py[2])
        fr = sigma_max_shifted(A, rx, ry)
        evals += 1
        if fr < fv[0]:
            ex = cx + 2.0 * (cx - px[2])
            ey = cy + 2.0 * (cy - py[2])
            fe = sigma_max_shifted(A, ex, ey)
            evals += 1
            if fe < fr:
                px[2], py[2], fv[2] = ex, ey, fe
            else:
                px[2], py[2], fv[2] = rx, ry, fr
            continue
        if fr < fv[1]:
            px[2], py[2], fv[2] = rx, ry, fr
            continue
        if fr < fv[2]:
            kx = cx + 0.5 * (rx - cx)
            ky = cy + 0.5 * (ry - cy)
        else:
            kx = cx + 0.5 * (px[2] - cx)
            ky = cy + 0.5 * (py[2] - cy)
        fk = sigma_max_shifted(A, kx, ky)
        evals += 1
        if fk < min(fr, fv[2]):
            px[2], py[2], fv[2] = kx, ky, fk
            continue
        for i in range(1, 3):
            px[i] = px[0] + 0.5 * (px[i] - px[0])
            py[i] = py[0] + 0.5 * (py[i] - py[0])
            fv[i] = sigma_max_shifted(A, px[i], py[i])
        evals += 2
    best = np.argmin(fv)
    return px[best], py[best], fv[best], evals


# --------------------------------------------------------------------------
# Smallest enclosing circle (Welzl, iterative move-to-front form)
# --------------------------------------------------------------------------

_IN_TOL = 1e-14


@kernel
def _inside(cx, cy, r, x, y, scale):
    return math.hypot(x - cx, y - cy) <= r * (1.0 + _IN_TOL) + _IN_TOL * scale


@kernel
def _circle_two(ax, ay, bx, by):
    cx = 0.5 * (ax + bx)
    cy = 0.5 * (ay + by)
    r = max(math.hypot(ax - cx, ay - cy), math.hypot(bx - cx, by - cy))
    return cx, cy, r


@kernel
def _circle_three(ax, ay, bx, by, qx, qy):
    # circumcircle in coordinates relative to a; collinear -> widest pair
    bx_ = bx - ax
    by_ = by - ay
    qx_ = qx - ax
    qy_ = qy - ay
    d = 2.0 * (bx_ * qy_ - by_ * qx_)
    span = max(abs(bx_), abs(by_), abs(qx_), abs(qy_))
    if abs(d) <= 1e-14 * span * span:
        c1 = _circle_two(ax, ay, bx, by)
        c2 = _circle_two(ax, ay, qx, qy)
        c3 = _circle_two(bx, by, qx, qy)
        best = c1
        if c2[2] > best[2]:
            best = c2
        if c3[2] > best[2]:
            best = c3
        return best
    b2 = bx_ * bx_ + by_ * by_
    q2 = qx_ * qx_ + qy_ * qy_
    ux = (qy_ * b2 - by_ * q2) / d
    uy = (bx_ * q2 - qx_ * b2) / d
    cx = ax + ux
    cy = ay + uy
    r = max(math.hypot(ax - cx, ay - cy), math.hypot(bx - cx, by - cy),
            math.hypot(qx - cx, qy - cy))
    return cx, cy, r


@kernel
def _move_to_front(xs, ys, i):
    x = xs[i]
    y = ys[i]
    for j in range(i, 0, -1):
        xs[j] = xs[j - 1]
        ys[j] = ys[j - 1]
    xs[0] = x
    ys[0] = y


@kernel
def welzl_circle(xs, ys):
    """Smallest enclosing circle of the (already shuffled) points.

    ``xs`` and ``ys`` are reordered in place by the move-to-front rule.
    Returns ``(cx, cy, r)``.
    """
    m = xs.shape[0]
    scale = 0.0
    for i in range(m):
        scale = max(scale, abs(xs[i]), abs(ys[i]))
    cx, cy, r = xs[0], ys[0], 0.0
    for i in range(1, m):
        if _inside(cx, cy, r, xs[i], ys[i], scale):
            continue
        # circle with point i on the boundary, over points 0..i-1
        px, py = xs[i], ys[i]
        cx, cy, r = px, py, 0.0
        for j in range(i):
            if _inside(cx, cy, r, xs[j], ys[j], scale):
                continue
            qx, qy = xs[j], ys[j]
            cx, cy, r = _circle_two(px, py, qx, qy)
            for k in range(j):
                if _inside(cx, cy, r, xs[k], ys[k], scale):
                    continue
                cx, cy, r = _circle_three(px, py, qx, qy, xs[k], ys[k])
        _move_to_front(xs, ys, i)
    return cx, cy, r


# --------------------------------------------------------------------------
# Constrained grid search for the four-variable lemma
# --------------------------------------------------------------------------

@kernel
def lemma_objective(x1, x2, x3, x4):
    return 2.0 * x1 * x1 * x3 - 2.0 * x1 * x4 + x2 * x2


@kernel
def lemma_x1_upper(x2, x3, x4):
    # upper end of the feasible x1 interval, clipped to the box [0, 1]
    rad = (1.0 - x2 * x2) * (x2 * x2 - x3 * x3)
    return min(1.0, x4 + math.sqrt(max(rad, 0.0)))


@kernel
def lemma_grid_max(resolution):
    """Grid maximum over x2 >= x3 in [0, 1], |x4| <= x2 x3, x1 at interval ends.

    The objective is convex in x1, so only ``x1 = 0`` and the upper end of the
    feasible interval need checking.  Returns ``(best, x1, x2, x3, x4)``.
    """
    best = -np.inf
    b1 = b2 = b3 = b4 = 0.0
    h = 1.0 / resolution
    for i2 in range(resolution + 1):
        x2 = i2 * h
        for i3 in range(i2 + 1):
            x3 = i3 * h
            cap = x2 * x3
            for i4 in range(resolution + 1):
                x4 = -cap + 2.0 * cap * i4 * h
                up = lemma_x1_upper(x2, x3, x4)
                if up < 0.0:
                    continue
                v0 = x2 * x2
                if v0 > best:
                    best, b1, b2, b3, b4 = v0, 0.0, x2, x3, x4
                v1 = lemma_objective(up, x2, x3, x4)
                if v1 > best:
                    best, b1, b2, b3, b4 = v1, up, x2, x3, x4
    return best, b1, b2, b3, b4


# --------------------------------------------------------------------------
# Rank-one moment ascent for even integer exponents
# --------------------------------------------------------------------------

@kernel
def even_moment_value_grad(A, x, k):
    """Value and Wirtinger gradient of x -> <x, |A - <x,Ax>|^(2k) x>.

    The gradient ``g`` satisfies ``df = 2 Re(g^* dx)``.
    """
    n = A.shape[0]
    Ax = A @ x
    m = np.vdot(x, Ax)
    M = A.copy()
    for i in range(n):
        M[i, i] -= m
    K = M.conj().T @ M
    vs = np.empty((k + 1, n), dtype=np.complex128)
    vs[0] = x
    for j in range(1, k + 1):
        vs[j] = K @ vs[j - 1]
    # x^* K^k x split as (K^a x)^* (K^b x) to stay symmetric
    a = k // 2
    val = np.vdot(vs[a], vs[k - a]).real
    g = vs[k].copy()
    Mh = M.conj().T
    c = 0.0 + 0.0j
    for j in range(k):
        c += np.vdot(vs[k - 1 - j], Mh @ vs[j])
    if c != 0.0:
        g -= c * Ax + c.conjugate() * (A.conj().T @ x)
    return val, g


@kernel
def even_moment_ascent(A, x0, k, max_iter, tol):
    """Riemannian gradient ascent on the unit sphere for the 2k-th moment.

    Adaptive step: grow on success, halve on failure.  Stops when an
    accepted step improves the value by less than ``tol``.
    Returns ``(value, x, iterations)``.
    """
    x = x0 / np.linalg.norm(x0)
    f, g = even_moment_value_grad(A, x, k)
    step = 1.0 / max(1.0, np.linalg.norm(g))
    it = 0
    while it < max_iter:
        it += 1
        gt = g - np.vdot(x, g).real * x
        gn = np.linalg.norm(gt)
        if gn == 0.0:
            break
        accepted = False
        while step * gn > 1e-16:
            xn = x + step * gt
            xn = xn / np.linalg.norm(xn)
            fn, gnew = even_moment_value_grad(A, xn, k)
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
