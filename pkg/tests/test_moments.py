import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import E2, JORDAN, random_density, random_matrix, random_normal, random_unitary
from ncmoments.harness import example1_partial_isometry, example1_projection
from ncmoments.linalg import Density, MatrixError, RankOneProjection
from ncmoments.moments import (bernoulli_b, central_moment, moment_report,
                               tracial_central_moment)
from oracles import bernoulli_grid, moment_oracle

seeds = st.integers(0, 2**32 - 1)
exponents = st.floats(1.0, 6.0)


# -- central_moment: literal values ---------------------------------------------------

def test_example1_fourth_moment():
    m = central_moment(example1_projection(), example1_partial_isometry(), 4)
    assert m.raw == pytest.approx(4 / 3, abs=1e-10)


@pytest.mark.parametrize("p", [1, 1.5, 2, 3, 4, 7.25])
def test_jordan_at_e2_is_one(p):
    m = central_moment(E2, JORDAN, p)
    assert m.raw == pytest.approx(1.0, abs=1e-12)
    assert m.mean == 1


@pytest.mark.parametrize("p", [1, 2, 4.5])
def test_scalar_matrix_has_zero_moment(rng, p):
    D = random_density(rng, 3)
    assert central_moment(D, (2 - 3j) * np.eye(3), p).raw == 0.0


def test_symmetric_bernoulli_variance():
    m = central_moment(np.eye(2) / 2, np.diag([0.0, 1.0]), 2)
    assert m.raw == pytest.approx(0.25)
    assert m.root == pytest.approx(0.5)
    assert m.mean == pytest.approx(0.5)


def test_moment_value_to_dict():
    d = central_moment(E2, JORDAN, 2).to_dict()
    assert d == {"p": 2.0, "raw": 1.0, "root": 1.0, "mean": {"re": 1.0, "im": 0.0}}


def test_central_moment_errors():
    with pytest.raises(MatrixError):
        central_moment(np.eye(3) / 3, JORDAN, 2)
    with pytest.raises(ValueError):
        central_moment(E2, JORDAN, 0.5)


def test_negative_moment_is_an_error():
    # an indefinite "density" produces a large negative moment
    with pytest.raises(ArithmeticError):
        central_moment(np.diag([2.0, -1.0]), np.diag([0.0, 5.0]), 2)


# -- central_moment: oracle and properties ----------------------------------------

@given(seeds, st.integers(1, 6), exponents)
def test_matches_eigh_oracle(seed, n, p):
    rng = np.random.default_rng(seed)
    A, D = random_matrix(rng, n), random_density(rng, n)
    ref = moment_oracle(D, A, p)
    assert central_moment(D, A, p).raw == pytest.approx(ref, rel=1e-7, abs=1e-7)


@given(seeds, st.integers(1, 6), exponents)
def test_translation_invariance(seed, n, p):
    rng = np.random.default_rng(seed)
    A, D = random_matrix(rng, n), random_density(rng, n)
    lam = complex(*rng.standard_normal(2)) * 3
    a = central_moment(D, A, p).raw
    b = central_moment(D, A + lam * np.eye(n), p).raw
    assert abs(a - b) <= 1e-9 * (1 + np.linalg.norm(A, 2) ** p)


@given(seeds, st.integers(1, 6), exponents)
def test_unitary_covariance(seed, n, p):
    rng = np.random.default_rng(seed)
    A, D, U = random_matrix(rng, n), random_density(rng, n), random_unitary(rng, n)
    a = central_moment(D, A, p).raw
    b = central_moment(U @ D @ U.conj().T, U @ A @ U.conj().T, p).raw
    assert abs(a - b) <= 1e-9 * (1 + a)


@given(seeds, st.integers(1, 6))
def test_variance_identity(seed, n):
    rng = np.random.default_rng(seed)
    A, D = random_matrix(rng, n), random_density(rng, n)
    m = np.trace(D @ A)
    expected = np.trace(D @ A.conj().T @ A).real - abs(m) ** 2
    assert central_moment(D, A, 2).raw == pytest.approx(expected, abs=1e-10)


@given(seeds, st.integers(1, 6), exponents, exponents)
def test_root_monotone_in_p(seed, n, p, q):
    rng = np.random.default_rng(seed)
    A, D = random_matrix(rng, n), random_density(rng, n)
    lo, hi = sorted((p, q))
    assert central_moment(D, A, lo).root <= central_moment(D, A, hi).root + 1e-10


@given(seeds, st.integers(1, 6), exponents)
def test_tracial_is_maximally_mixed(seed, n, p):
    A = random_matrix(np.random.default_rng(seed), n)
    a = tracial_central_moment(A, p).raw
    b = central_moment(Density.maximally_mixed(n), A, p).raw
    assert a == pytest.approx(b, rel=1e-12, abs=1e-14)


def test_tracial_trivial():
    assert tracial_central_moment(np.diag([1.0, -1.0]), 2).raw == pytest.approx(1.0)
    assert tracial_central_moment(5j * np.eye(4), 3).raw == 0.0


def test_accepts_rank_one_projection(rng):
    x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    P = RankOneProjection.from_vector(x, normalize=True)
    A = random_matrix(rng, 3)
    assert central_moment(P, A, 3).raw == pytest.approx(central_moment(P.matrix, A, 3).raw)


# -- Bernoulli constants --------------------------------------------------------------

def test_b2_closed_form():
    b = bernoulli_b(2)
    assert b.b_p == 0.25 and b.argmax_t == 0.5


def test_b4_is_one_twelfth():
    b = bernoulli_b(4)
    assert b.b_p == pytest.approx(1 / 12, abs=1e-10)
    t = b.argmax_t
    assert t * (1 - t) == pytest.approx(1 / 6, abs=1e-12)


@pytest.mark.parametrize("p", [1, 1.25, 1.5, 1.75, 2])
def test_small_p_closed_form(p):
    b = bernoulli_b(p)
    assert b.b_p == pytest.approx(2.0 ** -p, abs=1e-10)
    assert 2 * b.root == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("p", [2.5, 3, 4, 5.5, 8, 16])
def test_against_dense_grid(p):
    assert bernoulli_b(p).b_p == pytest.approx(bernoulli_grid(p), abs=1e-10)


@given(st.floats(1.0, 40.0))
def test_argmax_consistent(p):
    b = bernoulli_b(p)
    t = b.argmax_t
    assert b.b_p == pytest.approx(t ** p * (1 - t) + t * (1 - t) ** p, abs=1e-12)
    assert 0 < b.b_p < 1 and 0 <= t <= 1


def test_root_nondecreasing_on_grid():
    roots = [bernoulli_b(p).root for p in (1, 1.5, 2, 3, 4, 8, 16)]
    assert all(a <= b + 1e-12 for a, b in zip(roots, roots[1:]))


def test_large_p_limit_proxy():
    assert 0.9 < bernoulli_b(64).root <= 1.0


def test_bernoulli_rejects_small_p():
    with pytest.raises(ValueError):
        bernoulli_b(0.9)


# -- moment_report ---------------------------------------------------------------------

def test_report_jordan_tight():
    rows = moment_report(E2, JORDAN, [1, 2])
    for row in rows:
        assert row["moment"]["root"] == pytest.approx(1.0)
        assert row["radius"] == pytest.approx(1.0, abs=1e-7)
        assert row["bound_root_le_radius"]


def test_report_identity_zero():
    rows = moment_report(np.eye(3) / 3, np.eye(3), [1, 2, 4])
    assert all(r["moment"]["raw"] == 0 for r in rows)


@pytest.mark.parametrize("seed", range(5))
def test_report_fourth_moment_bound_normal(seed):
    rng = np.random.default_rng(seed)
    A, D = random_normal(rng, 4), random_density(rng, 4)
    row = moment_report(D, A, [4])[0]
    assert row["bound_fourth_holds"]
    assert row["moment"]["raw"] <= 4 / 3 * row["radius"] ** 4 + 1e-8
