import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from interplpe.errors import IncompleteDerivatives, InvalidParameter
from interplpe.poly_basis import Basis, enumerate_basis, taylor_eval, u_vector


def test_order_zero_basis():
    b = enumerate_basis(0, 3)
    assert b.indices == ((0, 0, 0),)
    assert len(b) == 1


def test_order_two_in_two_variables():
    b = enumerate_basis(2, 2)
    assert len(b) == 6
    assert b.indices == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))


def test_order_seven_on_the_line():
    b = enumerate_basis(7, 1)
    assert b.indices == tuple((k,) for k in range(8))


@given(st.integers(0, 6), st.integers(1, 4))
def test_basis_size_is_binomial(order, dim):
    b = enumerate_basis(order, dim)
    assert len(b) == math.comb(order + dim, dim)
    assert len(set(b.indices)) == len(b)
    degrees = [sum(s) for s in b.indices]
    assert degrees == sorted(degrees)


def test_invalid_basis():
    with pytest.raises(InvalidParameter):
        Basis(-1, 1)
    with pytest.raises(InvalidParameter):
        Basis(1, 0)


@given(st.integers(0, 5), st.integers(1, 3))
def test_u_vector_at_origin(order, dim):
    b = enumerate_basis(order, dim)
    v = u_vector(b, np.zeros(dim))
    assert v[0] == 1.0
    assert np.all(v[1:] == 0.0)


def test_u_vector_examples():
    np.testing.assert_array_equal(u_vector(enumerate_basis(2, 1), 2.0), [1.0, 2.0, 2.0])
    np.testing.assert_array_equal(u_vector(enumerate_basis(1, 2), [3.0, 5.0]), [1.0, 3.0, 5.0])
    np.testing.assert_allclose(u_vector(enumerate_basis(2, 2), [3.0, 5.0]),
                               [1, 3, 5, 4.5, 15, 12.5])


def test_u_vector_batches():
    b = enumerate_basis(3, 1)
    pts = np.array([0.5, -1.0, 2.0])
    out = u_vector(b, pts)
    assert out.shape == (3, 4)
    for row, u in zip(out, pts):
        np.testing.assert_allclose(row, [u ** p / math.factorial(p) for p in range(4)])


def test_u_vector_dimension_mismatch():
    with pytest.raises(InvalidParameter):
        u_vector(enumerate_basis(1, 2), [1.0, 2.0, 3.0])


@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 4))
def test_taylor_of_constant(c, x, order):
    derivs = {s: (c if sum(s) == 0 else 0.0) for s in enumerate_basis(order, 1).indices}
    assert taylor_eval(derivs, 0.0, x, order) == pytest.approx(c)


def _cubic_derivs(y):
    # f(x) = x^3 - x
    return {(0,): y ** 3 - y, (1,): 3 * y ** 2 - 1, (2,): 6 * y, (3,): 6.0}


def test_taylor_of_cubic_is_exact():
    assert taylor_eval(_cubic_derivs(0.0), 0.0, 2.0, 3) == pytest.approx(6.0, abs=1e-14)


def test_taylor_first_order_remainder():
    approx = taylor_eval(_cubic_derivs(0.0), 0.0, 0.1, 1)
    assert approx == pytest.approx(-0.1)
    assert abs(0.1 ** 3 - 0.1 - approx) == pytest.approx(0.001)
    assert abs(0.1 ** 3 - 0.1 - approx) <= 0.1 * 0.1 ** 2 + 1e-15


def test_taylor_accepts_integer_keys_on_the_line():
    assert taylor_eval({0: 1.0, 1: 2.0}, 0.0, 3.0, 1) == pytest.approx(7.0)


def test_taylor_two_variables():
    # f(x, y) = x * y around (1, 2)
    derivs = {(0, 0): 2.0, (1, 0): 2.0, (0, 1): 1.0, (2, 0): 0.0, (1, 1): 1.0, (0, 2): 0.0}
    assert taylor_eval(derivs, [1.0, 2.0], [3.0, -1.0], 2) == pytest.approx(-3.0)


def test_taylor_missing_derivative():
    with pytest.raises(IncompleteDerivatives):
        taylor_eval({(0,): 1.0}, 0.0, 1.0, 1)
