import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import JORDAN, random_matrix, random_normal
from ncmoments.geometry import (Circle, chebyshev_radius, jung_check,
                                smallest_enclosing_circle, spread, support_points)
from ncmoments.harness import example1_partial_isometry
from oracles import chebyshev_cvxpy, chebyshev_scipy, enclosing_circle_bruteforce

seeds = st.integers(0, 2**32 - 1)
CUBE_ROOTS = np.exp(2j * np.pi * np.arange(3) / 3)


# -- spread --------------------------------------------------------------------

def test_spread_diagonal():
    r = spread(np.diag([0.0, 1.0, 3.0]))
    assert r.value == pytest.approx(3.0)
    assert abs(r.witness[0] - r.witness[1]) == pytest.approx(3.0)


def test_spread_example1():
    assert spread(example1_partial_isometry()).value == pytest.approx(2.0, abs=1e-8)


@given(seeds, st.integers(1, 7))
def test_spread_hermitian_matches_eigvalsh(seed, n):
    G = random_matrix(np.random.default_rng(seed), n)
    H = G + G.conj().T
    w = np.linalg.eigvalsh(H)
    assert spread(H).value == pytest.approx(w[-1] - w[0], abs=1e-9 * (1 + abs(w).max()))


@given(seeds, st.integers(2, 7))
def test_spread_dominates_all_pairs(seed, n):
    A = random_matrix(np.random.default_rng(seed), n)
    lam = np.linalg.eigvals(A)
    assert spread(A).value >= np.max(np.abs(lam[:, None] - lam[None, :])) - 1e-8


# -- smallest enclosing circle ------------------------------------------------------

def test_circle_two_points():
    c = smallest_enclosing_circle([0, 1])
    assert c.center == pytest.approx(0.5) and c.radius == pytest.approx(0.5)


def test_circle_single_point():
    c = smallest_enclosing_circle([2 + 1j])
    assert c.center == 2 + 1j and c.radius == 0.0


def test_circle_cube_roots():
    c = smallest_enclosing_circle(CUBE_ROOTS)
    assert abs(c.center) < 1e-15 and c.radius == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("seed", range(6))
def test_circle_fifty_points_bruteforce(seed):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(50) + 1j * rng.standard_normal(50)
    c = smallest_enclosing_circle(z, seed=seed)
    c0, r0 = enclosing_circle_bruteforce(z)
    assert c.radius == pytest.approx(r0, abs=1e-10)
    assert abs(c.center - c0) < 1e-8
    assert c.contains(z)


@given(seeds, st.integers(1, 30))
def test_circle_contains_all_points(seed, m):
    rng = np.random.default_rng(seed)
    z = rng.uniform(-5, 5, m) + 1j * rng.uniform(-5, 5, m)
    c = smallest_enclosing_circle(z, seed=seed)
    assert np.all(np.abs(z - c.center) <= c.radius + 1e-12 * max(1, c.radius))


@given(seeds, st.integers(3, 30))
def test_circle_determined_by_support(seed, m):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    c = smallest_enclosing_circle(z)
    sup = support_points(z, c)
    assert sup.size >= 2
    c2 = smallest_enclosing_circle(sup)
    assert c2.radius == pytest.approx(c.radius, abs=1e-10)
    assert abs(c2.center - c.center) < 1e-8


@given(seeds)
def test_circle_seed_independent_value(seed):
    z = np.random.default_rng(0).standard_normal(20) * (1 + 1j)
    z = z + 1j * np.random.default_rng(1).standard_normal(20)
    a = smallest_enclosing_circle(z, seed=seed)
    b = smallest_enclosing_circle(z, seed=0)
    assert a.radius == pytest.approx(b.radius, abs=1e-12)


def test_circle_rejects_empty_and_nonfinite():
    with pytest.raises(ValueError):
        smallest_enclosing_circle([])
    with pytest.raises(ValueError):
        smallest_enclosing_circle([0, np.nan])


def test_circle_contains_helper():
    assert Circle(0j, 1.0).contains([1, 1j, -0.5])
    assert not Circle(0j, 1.0).contains([1.1])


# -- Jung ---------------------------------------------------------------------------

def test_jung_two_points():
    r, d, ok = jung_check([0, 1])
    assert (r, d, ok) == (pytest.approx(0.5), pytest.approx(1.0), True)


def test_jung_cube_roots_tight():
    r, d, ok = jung_check(CUBE_ROOTS)
    assert ok
    assert d == pytest.approx(math.sqrt(3), abs=1e-15)
    assert abs(r - d / math.sqrt(3)) <= 1e-12


@given(seeds, st.integers(2, 40))
def test_jung_always_holds(seed, m):
    rng = np.random.default_rng(seed)
    assert jung_check(rng.standard_normal(m) + 1j * rng.standard_normal(m))[2]


def test_jung_needs_two_points():
    with pytest.raises(ValueError):
        jung_check([1])


# -- Chebyshev radius -------------------------------------------------------------

def test_chebyshev_example1():
    assert chebyshev_radius(example1_partial_isometry()).radius == pytest.approx(1.0, abs=1e-7)


def test_chebyshev_jordan():
    r = chebyshev_radius(JORDAN)
    assert r.radius == pytest.approx(1.0, abs=1e-7)
    assert abs(r.lambda_star - 1) < 1e-6


def test_chebyshev_diag_0_2():
    r = chebyshev_radius(np.diag([0.0, 2.0]))
    assert r.radius == pytest.approx(1.0, abs=1e-9)
    assert abs(r.lambda_star - 1) < 1e-6


def test_chebyshev_scalar_matrix():
    r = chebyshev_radius(3j * np.eye(4))
    assert r.radius == 0.0 and r.lambda_star == 3j


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("n", [2, 4, 6])
def test_chebyshev_matches_cvxpy(seed, n):
    A = random_matrix(np.random.default_rng(seed), n)
    _, ref = chebyshev_cvxpy(A)
    assert chebyshev_radius(A).radius == pytest.approx(ref, abs=1e-6)


@pytest.mark.parametrize("seed", range(4))
def test_chebyshev_matches_powell(seed):
    A = random_matrix(np.random.default_rng(100 + seed), 5)
    _, ref = chebyshev_scipy(A)
    assert chebyshev_radius(A).radius <= ref + 1e-9
    assert chebyshev_radius(A).radius == pytest.approx(ref, abs=1e-7)


@given(seeds, st.integers(1, 6))
def test_chebyshev_normal_is_enclosing_radius(seed, n):
    A = random_normal(np.random.default_rng(seed), n)
    lam = np.linalg.eigvals(A)
    assert chebyshev_radius(A).radius == pytest.approx(
        smallest_enclosing_circle(lam).radius, abs=1e-7)


@given(seeds, st.integers(1, 6))
def test_chebyshev_translation(seed, n):
    rng = np.random.default_rng(seed)
    A = random_matrix(rng, n)
    c = complex(*rng.standard_normal(2)) * 2
    r0, r1 = chebyshev_radius(A), chebyshev_radius(A + c * np.eye(n))
    assert r1.radius == pytest.approx(r0.radius, abs=1e-8)
    # the minimiser is unique only up to flat directions; compare values there
    shifted = np.linalg.norm(A + c * np.eye(n) - (r0.lambda_star + c) * np.eye(n), 2)
    assert shifted == pytest.approx(r1.radius, abs=1e-8)


@given(seeds, st.integers(1, 6))
def test_chebyshev_below_trace_shift(seed, n):
    A = random_matrix(np.random.default_rng(seed), n)
    feasible = np.linalg.norm(A - np.trace(A) / n * np.eye(n), 2)
    assert chebyshev_radius(A).radius <= feasible + 1e-10


@given(seeds, st.integers(2, 6))
def test_chebyshev_normal_jung(seed, n):
    A = random_normal(np.random.default_rng(seed), n)
    assert chebyshev_radius(A).radius <= spread(A).value / math.sqrt(3) + 1e-8
