import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from interplpe.errors import InvalidMatrix, InvalidParameter, QuadratureDiverged
from interplpe.numerics import (RandomSource, gaussian, jacobi_eigh, min_eigenvalue,
                                pseudo_inverse, quad_1d)
from oracles import bisect_min_eigenvalue, gauss_jordan_inverse


def _spd(rng, n):
    g = rng.normal(size=(n, n))
    return g @ g.T + n * np.eye(n)


def test_pseudo_inverse_identity():
    np.testing.assert_array_equal(pseudo_inverse(np.eye(3), 1e-12), np.eye(3))


def test_pseudo_inverse_singular_diagonal():
    np.testing.assert_allclose(pseudo_inverse(np.diag([2.0, 0.0]), 1e-12), np.diag([0.5, 0.0]),
                               atol=1e-15)


def test_pseudo_inverse_matches_gauss_jordan():
    rng = np.random.default_rng(4)
    a = _spd(rng, 4)
    pinv = pseudo_inverse(a)
    np.testing.assert_allclose(pinv, np.array(gauss_jordan_inverse(a.tolist())), rtol=1e-10)
    np.testing.assert_allclose(a @ pinv, np.eye(4), atol=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(1, 5), st.integers(0, 2**31))
def test_pseudo_inverse_penrose_conditions(n, rank, seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(n, min(rank, n)))
    a = g @ g.T
    p = pseudo_inverse(a)
    scale = max(1.0, np.abs(a).max()) * max(1.0, np.abs(p).max())
    np.testing.assert_allclose(a @ p @ a, a, atol=1e-8 * scale)
    np.testing.assert_allclose(p @ a @ p, p, atol=1e-8 * scale)
    np.testing.assert_allclose(a @ p, (a @ p).T, atol=1e-8 * scale)


def test_pseudo_inverse_rejects_asymmetric():
    with pytest.raises(InvalidMatrix):
        pseudo_inverse(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(InvalidMatrix):
        pseudo_inverse(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    with pytest.raises(InvalidMatrix):
        pseudo_inverse(np.ones((2, 3)))


def test_pseudo_inverse_rejects_negative_tol():
    with pytest.raises(InvalidParameter):
        pseudo_inverse(np.eye(2), -1.0)


def test_min_eigenvalue_examples():
    assert min_eigenvalue(np.diag([3.0, 1.0, 2.0])) == pytest.approx(1.0, abs=1e-14)
    assert min_eigenvalue(np.array([[2.0, 1.0], [1.0, 2.0]])) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("seed", range(5))
def test_min_eigenvalue_matches_bisection(seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(5, 5))
    m = (g + g.T) / 2
    assert min_eigenvalue(m) == pytest.approx(bisect_min_eigenvalue(m.tolist()), abs=1e-8)


def test_min_eigenvalue_stack():
    stack = np.stack([np.diag([3.0, 1.0]), np.diag([-2.0, 5.0])])
    np.testing.assert_allclose(min_eigenvalue(stack), [1.0, -2.0], atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (4, 4), elements=st.floats(-10, 10)))
def test_jacobi_eigh_reconstructs(g):
    m = (g + g.T) / 2
    w, v = jacobi_eigh(m)
    assert np.all(np.diff(w) >= 0)
    scale = max(1.0, np.abs(m).max())
    np.testing.assert_allclose(v @ np.diag(w) @ v.T, m, atol=1e-10 * scale)
    np.testing.assert_allclose(v.T @ v, np.eye(4), atol=1e-10)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(m), atol=1e-10 * scale)


def test_quad_constant():
    assert quad_1d(lambda u: np.ones_like(u), 0.0, 1.0) == pytest.approx(1.0, abs=1e-12)


def test_quad_integrable_singularity():
    assert quad_1d(lambda u: u ** -0.4, 0.0, 1.0) == pytest.approx(1.0 / 0.6, abs=1e-8)


def test_quad_singularity_at_both_ends():
    val = quad_1d(lambda u: (u * (1 - u)) ** -0.5, 0.0, 1.0, abs_tol=1e-10)
    assert val == pytest.approx(math.pi, abs=1e-6)


@pytest.mark.parametrize("p", [2.0, 1.0])
def test_quad_divergent(p):
    with pytest.raises(QuadratureDiverged):
        quad_1d(lambda u: u ** -p, 0.0, 1.0)


def test_quad_smooth_polynomial():
    assert quad_1d(lambda u: 3 * u ** 2, -1.0, 2.0) == pytest.approx(9.0, abs=1e-12)


def test_gaussian_zero_variance_returns_mean():
    assert gaussian(RandomSource(3), 1.25, 0.0) == 1.25


def test_gaussian_determinism():
    a = [gaussian(RandomSource(11), 0.0, 1.0) for _ in range(3)]
    r1, r2 = RandomSource(7), RandomSource(7)
    assert [gaussian(r1, 0, 1) for _ in range(20)] == [gaussian(r2, 0, 1) for _ in range(20)]
    assert a[0] == a[1] == a[2]


def test_gaussian_sample_variance():
    draws = RandomSource(2024).normal(0.0, 0.5, size=100_000)
    assert 0.48 <= draws.var() <= 0.52
    assert abs(draws.mean()) < 0.01


def test_gaussian_negative_variance():
    with pytest.raises(InvalidParameter):
        gaussian(RandomSource(0), 0.0, -1.0)


def test_uniform_range_and_moments():
    u = RandomSource(5).uniform(-2.0, 2.0, size=50_000)
    assert u.min() >= -2.0 and u.max() < 2.0
    assert abs(u.mean()) < 0.03
    assert u.var() == pytest.approx(4.0 / 3.0, rel=0.03)


def test_distinct_seeds_give_distinct_streams():
    assert not np.array_equal(RandomSource(1).uniform(size=10), RandomSource(2).uniform(size=10))
