import csv

import gmpy2
import pytest
from gmpy2 import mpfr, mpq
from hypothesis import given, strategies as st

from strongcoupling.accel import (RichardsonRow, SequenceData, monotonicity, richardson,
                                  richardson_report, write_report_csv)
from strongcoupling.errors import InsufficientData
from strongcoupling.exact import precision

PREC = 256
# inputs carry guard bits: the transform amplifies input rounding by about
# n**k, which is a property of the data, not of the extrapolation
INPUT_PREC = PREC + 64
coeff = st.fractions(min_value=-5, max_value=5, max_denominator=9).map(
    lambda f: mpq(f.numerator, f.denominator))


def seq_from(fn, n0, count, prec=INPUT_PREC):
    with precision(prec):
        return SequenceData(tuple(mpfr(fn(mpq(n))) for n in range(n0, n0 + count)), n0)


def rel_err(x, y):
    with precision(2 * PREC):
        return abs(x - mpfr(y)) / max(abs(mpfr(y)), mpfr(1))


def test_constant_sequence_is_fixed():
    s = SequenceData((mpfr("2.5", PREC),) * 12, 3)
    for k in range(1, 7):
        assert all(v == mpfr("2.5") for v in richardson(s, k).values)


def test_one_plus_one_over_n_is_exact():
    r = richardson(seq_from(lambda n: 1 + 1 / n, 1, 20), 1)
    assert all(rel_err(v, 1) < mpfr(2) ** -(PREC - 4) for v in r.values)
    assert len(r) == 19 and r.start == 1


@given(st.integers(1, 6), st.lists(coeff, min_size=7, max_size=7), st.integers(1, 40))
def test_polynomial_tail_is_annihilated(k, cs, n0):
    def A(n):
        return sum(cs[i] / n ** i for i in range(k + 1))
    r = richardson(seq_from(A, n0, k + 8), k)
    scale = max(1, *(abs(c) for c in cs))
    for v in r.values:
        assert rel_err(v, cs[0]) <= 10 * mpfr(2) ** -PREC * scale


@given(coeff, coeff, st.integers(1, 4))
def test_linearity(alpha, beta, k):
    a = seq_from(lambda n: 1 / n + mpq(1, n * n + 1), 2, 15)
    b = seq_from(lambda n: mpq(3) - mpq(2, n + 1), 2, 15)
    with precision(INPUT_PREC):
        combo = SequenceData(tuple(alpha * x + beta * y for x, y in zip(a.values, b.values)), 2)
    lhs = richardson(combo, k).values
    ra, rb = richardson(a, k).values, richardson(b, k).values
    for x, ya, yb in zip(lhs, ra, rb):
        with precision(2 * PREC):
            y = alpha * ya + beta * yb
            big = max(abs(y), abs(alpha * ya), abs(beta * yb))
            ulp = mpfr(2) ** (gmpy2.get_exp(big) - PREC) if big else mpfr(0)
            assert abs(x - y) <= 2 * ulp


def test_repeated_first_order_matches_second_order_on_model_family():
    s = seq_from(lambda n: mpq(7, 3) - mpq(4, 5) / n, 5, 20)
    twice = richardson(richardson(s, 1), 1)
    once = richardson(s, 2)
    for x, y in zip(twice.values, once.values):
        assert rel_err(x, mpq(7, 3)) < mpfr(2) ** -(PREC - 10)
        assert rel_err(y, mpq(7, 3)) < mpfr(2) ** -(PREC - 10)


def test_insufficient_data():
    s = SequenceData((mpfr(1),) * 4)
    with pytest.raises(InsufficientData):
        richardson(s, 4)
    with pytest.raises(InsufficientData):
        richardson(SequenceData((mpfr(1),)), 1)
    with pytest.raises(InsufficientData):
        SequenceData(())
    with pytest.raises(InsufficientData):
        richardson_report(SequenceData((mpfr(1),) * 15), 6)
    with pytest.raises(ValueError):
        richardson(s, 0)


def test_monotonicity_flags():
    assert monotonicity([1, 2, 3, 4]) == "increasing"
    assert monotonicity([4, 3, 2, 1]) == "decreasing"
    assert monotonicity([1, 3, 2, 4]) == "oscillating"
    # magnitudes: a negative sequence approaching zero is decreasing
    assert monotonicity([-4, -3, -2, -1]) == "decreasing"
    # only the final window counts
    assert monotonicity([9, 0, 1, 2, 3], window=4) == "increasing"


def test_monotonicity_sees_differences_below_double_precision():
    with precision(PREC):
        base = mpfr(1) / 3
        vals = [base + i * mpfr(2) ** -100 for i in range(10)]
    assert monotonicity(vals) == "increasing"


def test_report_and_csv(tmp_path):
    s = seq_from(lambda n: 2 + mpq(1, n) + mpq(1, n ** 3 + 7), 1, 40)
    rows = richardson_report(s, 3)
    assert [r.k for r in rows] == [1, 2, 3]
    assert all(isinstance(r, RichardsonRow) for r in rows)
    assert abs(rows[-1].value - 2) < abs(rows[0].value - 2)
    path = tmp_path / "r.csv"
    write_report_csv(rows, path)
    got = list(csv.DictReader(path.open()))
    assert list(got[0]) == ["k", "value", "flag"]
    assert [g["k"] for g in got] == ["1", "2", "3"]
