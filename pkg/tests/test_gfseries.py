from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from braidkl.exactmath import IntPolynomial
from braidkl.gfseries import (
    BivariateSeries,
    build_A,
    build_C,
    build_S,
    compose_x,
    compositional_inverse_x,
    count_row,
    derivative_x,
    integrate_x,
    kl_poly_from_S,
    lagrange_inverse_x,
    log_one_plus,
    phi_series,
    series_exp,
    series_mul,
    series_reciprocal,
    z_poly_from_A,
)

from reference_data import QSP_COUNTS, SIMPLE_QSP_COUNTS, SP_COUNTS

F = Fraction
N = 8


def scaled(series, n, k):
    return series.coeff(n, k) * factorial(n)


def ypoly(*cs):
    return tuple(F(c) for c in cs)


def random_series(order):
    coeff = st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4), max_size=3)
    return st.lists(coeff, min_size=order + 1, max_size=order + 1).map(lambda cs: BivariateSeries(order, cs))


def test_mul_examples():
    one_plus_x = BivariateSeries.from_x_coeffs(N, [1, 1])
    geometric = BivariateSeries.from_x_coeffs(N, [(-1) ** m for m in range(N + 1)])
    assert one_plus_x * geometric == BivariateSeries.one(N)
    f = phi_series(N)
    assert f * BivariateSeries.one(N) == f
    assert series_mul(BivariateSeries.x(2), BivariateSeries.x(2)) == BivariateSeries.from_x_coeffs(2, [0, 0, 1])
    assert series_mul(BivariateSeries.x(1), BivariateSeries.x(1)) == BivariateSeries.zero(1)
    with pytest.raises(ValueError):
        BivariateSeries.x(2) + BivariateSeries.x(3)


def test_exp_examples():
    assert series_exp(BivariateSeries.zero(N)) == BivariateSeries.one(N)
    assert series_exp(BivariateSeries.x(N)).coeff(2, 0) == F(1, 2)
    assert scaled(series_exp(build_C(N)), 2, 0) == 1
    with pytest.raises(ValueError):
        series_exp(BivariateSeries.one(N))


def test_log_examples():
    assert log_one_plus(BivariateSeries.x(N)).coeff(2, 0) == F(-1, 2)
    assert log_one_plus(BivariateSeries.zero(N)) == BivariateSeries.zero(N)
    assert phi_series(N)[2] == ypoly(F(-1, 2), F(-1, 2))


def test_phi_matches_log_construction():
    # (1/y) log(1 + x y) has x^m coefficient (-1)^(m+1) y^(m-1) / m
    xy = BivariateSeries(N, [(), ypoly(0, 1)])
    log_xy = log_one_plus(xy)
    shifted = BivariateSeries(N, [c[1:] for c in log_xy.coeffs])
    expected = shifted + log_one_plus(BivariateSeries.x(N)) - BivariateSeries.x(N)
    assert phi_series(N) == expected


def test_inverse_examples():
    assert compositional_inverse_x(BivariateSeries.x(N)) == BivariateSeries.x(N)
    inv = compositional_inverse_x(phi_series(N))
    assert scaled(inv, 2, 0) == 1 and scaled(inv, 2, 1) == 1
    assert [scaled(inv, 3, k) for k in range(3)] == [1, 6, 1]
    with pytest.raises(ValueError):
        compositional_inverse_x(BivariateSeries.from_x_coeffs(N, [0, 2]))


def test_newton_equals_lagrange():
    for order in (1, 2, 5, 9):
        f = phi_series(order)
        assert compositional_inverse_x(f) == lagrange_inverse_x(f)


@given(random_series(5))
@settings(max_examples=20, deadline=None)
def test_inverse_roundtrip(f):
    f = BivariateSeries(5, [(), (1,)] + list(f.coeffs[2:]))
    g = compositional_inverse_x(f)
    assert compose_x(f, g) == BivariateSeries.x(5)
    assert compose_x(g, f) == BivariateSeries.x(5)


@given(random_series(4), random_series(4))
@settings(max_examples=20, deadline=None)
def test_mul_commutes_and_derivative_is_leibniz(f, g):
    assert f * g == g * f
    lhs = derivative_x(f * g)
    rhs = derivative_x(f) * g + f * derivative_x(g)
    assert lhs.truncate(2) == rhs.truncate(2)


def test_reciprocal():
    f = BivariateSeries(N, [(1,), ypoly(1, 1), ypoly(0, 2)])
    assert f * series_reciprocal(f) == BivariateSeries.one(N)


def test_integrate_examples():
    assert integrate_x(BivariateSeries.one(N)) == BivariateSeries.x(N)
    assert integrate_x(BivariateSeries.x(N)).coeff(2, 0) == F(1, 2)
    total = integrate_x(compositional_inverse_x(phi_series(N)))
    assert [scaled(total, 5, k) for k in range(4)] == [1, 25, 25, 1]


def test_compose_examples():
    f = phi_series(N)
    assert compose_x(f, BivariateSeries.x(N)) == f
    exp_minus_one = BivariateSeries.from_x_coeffs(N, [0] + [F(1, factorial(m)) for m in range(1, N + 1)])
    log1p = BivariateSeries.from_x_coeffs(N, [0] + [F((-1) ** (m + 1), m) for m in range(1, N + 1)])
    assert compose_x(exp_minus_one, log1p) == BivariateSeries.x(N)
    assert scaled(build_S(N), 3, 2) == 1


def test_C_matches_reference_counts():
    c = build_C(N)
    assert scaled(c, 4, 2) == 6 and scaled(c, 6, 3) == 290
    assert scaled(c, 1, 0) == 1 and scaled(c, 1, 1) == 1
    for n, row in SP_COUNTS.items():
        assert count_row(c, n) == list(row)


def test_A_matches_reference_counts():
    a = build_A(N)
    assert scaled(a, 4, 2) == 35 and scaled(a, 7, 3) == 10941
    for n in range(N + 1):
        assert scaled(a, n, n) == 1
        row = count_row(a, n)
        assert row == row[::-1]
    for n, row in QSP_COUNTS.items():
        assert count_row(a, n) == list(row)


def test_S_matches_reference_counts():
    s = build_S(N)
    assert scaled(s, 5, 3) == 15 and scaled(s, 7, 4) == 735 and scaled(s, 8, 5) == 16065
    for n, row in SIMPLE_QSP_COUNTS.items():
        assert count_row(s, n) == list(row)


def test_S_is_integral_to_order_twelve():
    s = build_S(12)
    for n in range(13):
        assert all(v >= 0 for v in count_row(s, n))


def test_polynomial_extraction():
    a, s = build_A(N), build_S(N)
    assert z_poly_from_A(a, 2) == IntPolynomial([1, 3, 1])
    assert z_poly_from_A(a, 0) == IntPolynomial([1])
    assert z_poly_from_A(a, 3) == IntPolynomial([1, 7, 7, 1])
    assert kl_poly_from_S(s, 3) == IntPolynomial([1, 1])
    assert kl_poly_from_S(s, 0) == IntPolynomial([1])
    assert kl_poly_from_S(s, 7) == IntPolynomial([1, 99, 1225, 735])
    with pytest.raises(ValueError):
        count_row(a, N + 1)
