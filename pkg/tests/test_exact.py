from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr, mpq
from hypothesis import given, strategies as st

from strongcoupling.errors import NonUnitLeadingCoefficient, ZeroBase
from strongcoupling.exact import (PowerSeries, format_rational, gen_binomial, log_abs_rational,
                                  parse_rational, precision, principal_power, rational,
                                  series_mul, series_pow, to_bigfloat)


# -- independent Fraction-based helpers ---------------------------------------

def frac_mul(u, v, order):
    return [sum(Fraction(u[k]) * Fraction(v[n - k]) for k in range(n + 1)) for n in range(order + 1)]


def frac_reciprocal(u, order):
    w = [Fraction(1) / Fraction(u[0])]
    for n in range(1, order + 1):
        w.append(-sum(Fraction(u[k]) * w[n - k] for k in range(1, n + 1)) / Fraction(u[0]))
    return w


def fr(series):
    return [Fraction(int(c.numerator), int(c.denominator)) for c in series]


def S(*c):
    return PowerSeries.of(*c)


small_rationals = st.fractions(min_value=-3, max_value=3, max_denominator=8)
unit_series = st.lists(small_rationals, min_size=1, max_size=7).map(
    lambda cs: PowerSeries(tuple([Fraction(1)] + cs)))


# -- rationals ------------------------------------------------------------------

def test_parse_and_format_round_trip():
    assert format_rational(parse_rational("-23/128")) == "-23/128"
    assert format_rational(parse_rational("2/4")) == "1/2"
    assert format_rational(parse_rational("3/-6")) == "-1/2"
    assert format_rational(parse_rational("7")) == "7/1"
    assert format_rational(mpq(0)) == "0/1"


@pytest.mark.parametrize("bad", ["", "1/0", "a/2", "1.5", "1/2/3"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        parse_rational(bad)


def test_rational_coercions():
    assert rational(Fraction(3, 9)) == mpq(1, 3)
    assert rational("5/10") == mpq(1, 2)
    assert rational(4) == mpq(4)
    with pytest.raises(TypeError):
        rational(0.5)


def test_bigfloat_conversion_is_correctly_rounded():
    x = to_bigfloat(mpq(1, 3), 64)
    assert x.precision == 64
    # the nearest 64-bit value to 1/3: error at most half an ulp
    err = abs(mpq(*x.as_integer_ratio()) - mpq(1, 3))
    assert err <= mpq(1, 2) * mpq(2) ** (gmpy2.get_exp(x) - 64)


def test_log_of_huge_rational():
    big = mpq(3) ** 200000 / mpq(2) ** 100001
    with precision(300):
        expected = 200000 * gmpy2.log(mpfr(3)) - 100001 * gmpy2.log(mpfr(2))
    assert abs(log_abs_rational(big, 256) - expected) < mpfr("1e-60") * abs(expected)
    with pytest.raises(ZeroBase):
        log_abs_rational(0)


# -- series algebra ---------------------------------------------------------------

def test_series_mul_examples():
    assert series_mul(S(1, 1), S(1, -1), 1).coefficients == (1, 0)
    assert series_mul(S(1, 1, 0), S(1, -1, 0), 2).coefficients == (1, 0, -1)
    u = S(1, mpq(-1, 2), mpq(1, 8))
    assert series_mul(u, u, 2).coefficients == (1, -1, mpq(1, 2))
    assert series_mul(u, S(1, 0, 0), 2) == u


def test_series_mul_order_guard():
    with pytest.raises(ValueError):
        series_mul(S(1, 1), S(1, 1, 1), 2)


def test_series_pow_examples():
    assert series_pow(S(1, 1, 0), 2, 2).coefficients == (1, 2, 1)
    u = S(1, mpq(-1, 2), mpq(1, 8))
    oracle = frac_mul(frac_reciprocal(u, 2), frac_reciprocal(u, 2), 2)
    assert fr(series_pow(u, -2, 2)) == oracle == [1, 1, Fraction(1, 2)]
    v = S(1, -2, 2)
    r = frac_reciprocal(v, 2)
    oracle4 = frac_mul(frac_mul(r, r, 2), frac_mul(r, r, 2), 2)
    assert fr(series_pow(v, -4, 2)) == oracle4 == [1, 8, 32]


def test_series_pow_requires_unit_constant():
    with pytest.raises(NonUnitLeadingCoefficient):
        series_pow(S(2, 1), mpq(1, 2), 1)


def test_series_pow_half_squares_back():
    u = S(1, 3, -1, 5, 2)
    half = series_pow(u, mpq(1, 2), 4)
    assert series_mul(half, half, 4) == u


@given(unit_series, st.sampled_from([mpq(1, 2), mpq(-1, 2), mpq(2), mpq(-2), mpq(-3)]),
       st.sampled_from([mpq(1, 2), mpq(-1, 2), mpq(2), mpq(-2), mpq(-3)]))
def test_series_pow_composition_law(u, a, b):
    n = u.order
    assert series_pow(u, a + b, n) == series_mul(series_pow(u, a, n), series_pow(u, b, n), n)


@given(unit_series)
def test_reciprocal_times_series_is_one(u):
    n = u.order
    prod = series_mul(series_pow(u, -1, n), u, n)
    assert prod.coefficients == tuple([1] + [0] * n)


@given(unit_series)
def test_integer_power_matches_repeated_product(u):
    n = u.order
    expected = frac_mul(frac_mul(list(u), list(u), n), list(u), n)
    assert fr(series_pow(u, 3, n)) == expected


# -- binomials ----------------------------------------------------------------------

def test_gen_binomial_examples():
    assert gen_binomial(mpq(-3, 2), 1) == mpq(-3, 2)
    assert gen_binomial(mpq(-5, 2), 2) == mpq(35, 8)
    assert gen_binomial(mpq(7, 3), 0) == 1
    assert gen_binomial(10, 3) == 120


@given(st.fractions(min_value=-20, max_value=20, max_denominator=12), st.integers(1, 20))
def test_pascal_identity(alpha, k):
    a = rational(alpha)
    assert gen_binomial(a, k) == gen_binomial(a - 1, k) + gen_binomial(a - 1, k - 1)


@given(st.fractions(min_value=-20, max_value=20, max_denominator=12), st.integers(0, 30))
def test_alternating_partial_sum_identity(alpha, m):
    a = rational(alpha)
    lhs = sum((-1) ** k * gen_binomial(a, k) for k in range(m + 1))
    assert lhs == (-1) ** m * gen_binomial(a - 1, m)


# -- principal powers ------------------------------------------------------------------

def test_principal_power_examples():
    assert f"{principal_power(2, mpq(-1, 4)).re:.10f}" == "0.8408964153"
    v = principal_power(-4, mpq(1, 2))
    assert v.re == 0 and v.im == 2 and not v.is_real
    assert f"{principal_power(mpq(35, 8), mpq(-1, 6)).re:.9f}" == "0.781934407"
    with pytest.raises(ZeroBase):
        principal_power(0, mpq(1, 2))


def test_principal_power_negative_base_general_exponent():
    v = principal_power(-8, mpq(1, 3))
    # 2 exp(i pi/3)
    assert abs(v.re - 1) < mpfr("1e-70")
    with precision(256):
        assert abs(v.im - gmpy2.sqrt(mpfr(3))) < mpfr("1e-70")
    w = principal_power(-2, 3)
    assert w.is_real and w.re == -8


@given(st.fractions(min_value=Fraction(1, 1000), max_value=1000, max_denominator=1000),
       st.fractions(min_value=-5, max_value=5, max_denominator=50))
def test_principal_power_positive_base_within_two_ulp(c, e):
    got = principal_power(rational(c), rational(e), 256).re
    with precision(512):
        ref = gmpy2.exp(mpfr(rational(e)) * gmpy2.log(mpfr(rational(c))))
    ulp = mpfr(2) ** (gmpy2.get_exp(got) - 256)
    with precision(512):
        assert abs(got - ref) <= 2 * ulp
