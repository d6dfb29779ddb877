import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kdsqnm.series import (
    SeriesError,
    TruncatedSeries as S,
    add,
    derivative,
    evaluate,
    mul,
    reciprocal,
    rotate_variable,
    sqrt,
)


def close(s, expected, tol=1e-14):
    return np.allclose(s.coeffs, np.asarray(expected, dtype=complex), rtol=0, atol=tol)


def test_add_examples():
    assert close(add(S([1, 2]), S([3, 4])), [4, 6])
    s = S([1.5, -2j, 3])
    assert add(s, S.zero(2)) == s
    assert close(add(S([1j, 0]), S([0, 1j])), [1j, 1j])


def test_mul_examples():
    assert close(mul(S([1, 1]), S([1, 1])), [1, 2])
    s = S([2, 3j, -1])
    assert mul(s, S.one(2)) == s
    assert close(mul(S([0, 1, 0]), S([0, 1, 0])), [0, 0, 1])


def test_mismatched_orders_raise():
    with pytest.raises(SeriesError):
        add(S([1, 2]), S([1, 2, 3]))
    with pytest.raises(SeriesError):
        mul(S([1]), S([1, 2]))


def test_reciprocal_examples():
    assert close(reciprocal(S([1, 1, 0])), [1, -1, 1])
    assert close(reciprocal(S([2, 0])), [0.5, 0])
    assert close(reciprocal(S([1, 1j])), [1, -1j])
    with pytest.raises(SeriesError):
        reciprocal(S([0, 1]))


def test_sqrt_examples():
    assert close(sqrt(S([4, 0, 0])), [2, 0, 0])
    assert close(sqrt(S([1, 2])), [1, 1])
    assert close(sqrt(S([1j, 0])), [cmath.exp(0.25j * cmath.pi), 0])
    for bad in ([-1, 0], [0, 1]):
        with pytest.raises(SeriesError):
            sqrt(S(bad))


def test_derivative_examples():
    assert close(derivative(S([5, 3, 2])), [3, 4, 0])
    assert close(derivative(S.constant(7, 3)), [0, 0, 0, 0])
    assert close(derivative(S([0, 0, 1])), [0, 2, 0])


def test_rotate_variable_examples():
    s = S([1, 2, 3])
    assert rotate_variable(s, 1.0) == s
    r = rotate_variable(S([1, 0, 1]), cmath.exp(-0.25j * cmath.pi))
    assert close(r, [1, 0, -1j])
    assert close(rotate_variable(S([0, 1]), 1j), [0, 1j])
    with pytest.raises(SeriesError):
        rotate_variable(s, 2.0)


def test_evaluate_examples():
    assert evaluate(S([1, 2, 3]), 1) == 6
    assert evaluate(S([2 - 1j, 5, 7]), 0) == 2 - 1j
    assert evaluate(S([0, 1]), 1j) == 1j


def test_operators_match_functions():
    s, t = S([1, 2j, 3]), S([0.5, -1, 2])
    assert s + t == add(s, t)
    assert s * t == mul(s, t)
    assert close(s / t, mul(s, reciprocal(t)).coeffs)
    assert close(s - s, [0, 0, 0])
    assert close(s**2, mul(s, s).coeffs)
    assert close(2 * s, [2, 4j, 6])


def test_immutable():
    s = S([1, 2])
    with pytest.raises(ValueError):
        s.coeffs[0] = 5


cplx = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


def series(order, nonzero_const=False):
    elems = st.lists(cplx, min_size=order + 1, max_size=order + 1)
    if nonzero_const:
        elems = elems.filter(lambda c: abs(c[0]) > 0.1)
    return elems.map(S)


@settings(max_examples=60, deadline=None)
@given(series(6), series(6), series(6))
def test_mul_commutative_associative(s, t, u):
    scale = max(1.0, *(np.abs(x.coeffs).max() for x in (s, t, u))) ** 3
    assert np.allclose(mul(s, t).coeffs, mul(t, s).coeffs, atol=1e-14 * scale)
    assert np.allclose(
        mul(mul(s, t), u).coeffs, mul(s, mul(t, u)).coeffs, atol=1e-13 * scale
    )


@settings(max_examples=60, deadline=None)
@given(series(8, nonzero_const=True))
def test_reciprocal_identity(s):
    # well-conditioned draws: constant term dominates
    s = S(np.concatenate([[s[0] * 10 / abs(s[0])], s.coeffs[1:] / 10]))
    r = mul(reciprocal(s), s).coeffs.copy()
    r[0] -= 1
    assert np.abs(r).max() <= 1e-13 * abs(s[0]) * 10


@settings(max_examples=60, deadline=None)
@given(series(8))
def test_sqrt_squares_back(s):
    c = s.coeffs.copy()
    c[0] = 5 + 0.5 * c[0] / max(1, abs(c[0]))
    s = S(c)
    t = sqrt(s)
    assert t[0].real > 0
    assert np.allclose(mul(t, t).coeffs, s.coeffs, atol=1e-13 * np.abs(c).max())


@settings(max_examples=60, deadline=None)
@given(series(7), series(7))
def test_leibniz_rule(s, t):
    lhs = derivative(mul(s, t)).coeffs
    rhs = add(mul(derivative(s), t), mul(s, derivative(t))).coeffs
    scale = max(1.0, np.abs(s.coeffs).max() * np.abs(t.coeffs).max())
    # top coefficient of the derivative is padding
    assert np.allclose(lhs[:-1], rhs[:-1], atol=1e-13 * scale)


@settings(max_examples=60, deadline=None)
@given(series(7), st.floats(0, 2 * np.pi))
def test_rotation_round_trip(s, theta):
    p = cmath.exp(1j * theta)
    back = rotate_variable(rotate_variable(s, p), p.conjugate())
    assert np.allclose(back.coeffs, s.coeffs, atol=1e-13 * max(1, np.abs(s.coeffs).max()))
