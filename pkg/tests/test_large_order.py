import csv
import json
import math

import gmpy2
import numpy as np
import pytest
from gmpy2 import mpfr, mpq
from hypothesis import given, strategies as st

from strongcoupling.errors import AmbiguousPhase, InsufficientData, NonPositiveB1
from strongcoupling.exact import precision
from strongcoupling.large_order import (GrowthAnsatz, best_pure_cosine, convolution_limit,
                                        convolution_sum, estimate_A, estimate_B, estimate_K,
                                        fit_growth, normalize_row, row_signs, sign_grid_search,
                                        sign_score, write_estimates_csv, write_peaks_json, zeta,
                                        zeta_consistency_K)

TWO_PI = 2 * math.pi


def planted_row(K, A, B, site, count, bits=640):
    """Rational rows a_j = (-1)**(site+j+1) B K**j j**A, accurate to ``bits`` bits."""
    row = [mpq(1)]
    with precision(bits):
        K, A, B = mpfr(K), mpfr(A), mpfr(B)
        for j in range(1, count + 1):
            v = (-1) ** (site + j + 1) * B * K ** j * mpfr(j) ** A
            row.append(mpq(*v.as_integer_ratio()))
    return row


def ulps(x, y, prec=256):
    with precision(2 * prec):
        y = mpfr(y)
        return abs(x - y) / mpfr(2) ** (gmpy2.get_exp(y) - prec)


# -- estimators ---------------------------------------------------------------------

def test_pure_power_law_gives_exact_exponent():
    row = [mpq(0)] + [(-1) ** j * mpq(2) ** j / mpq(j) ** 2 for j in range(1, 40)]
    est = estimate_A(row)
    assert est.indices == tuple(range(1, 38)) and not est.gaps
    assert all(ulps(v, -2) <= 2 for v in est.values)


@pytest.mark.parametrize("K, A, B, site", [
    (2, mpq(-3, 2), mpq(1, 7), 1),
    (mpq(5, 2), mpq(-3, 2), mpq(3, 25), 2),
    (3, mpq(1, 3), 2, 1),
])
def test_estimators_recover_planted_constants(K, A, B, site):
    row = planted_row(K, A, B, site, 60)
    for v in estimate_A(row).values:
        assert ulps(v, A) <= 2
    for v in estimate_K(row, A).values:
        assert ulps(v, K) <= 2
    for v in estimate_B(row, K, A).values:
        assert ulps(v, B) <= 2


def test_fit_growth_on_planted_row(tmp_path):
    row = planted_row("2.46682906", mpq(-3, 2), "0.0171", 1, 80)
    fit = fit_growth(row, 1)
    with precision(256):
        assert abs(fit.ansatz.A + mpfr(1.5)) < mpfr("1e-60")
        assert abs(fit.ansatz.K - mpfr("2.46682906")) < mpfr("1e-60")
        assert abs(fit.ansatz.B - mpfr("0.0171")) < mpfr("1e-60")
    path = tmp_path / "e.csv"
    write_estimates_csv(fit, path)
    rows = list(csv.DictReader(path.open()))
    assert list(rows[0]) == ["j", "A", "K", "B"] and len(rows) == 78


def test_zero_coefficient_produces_gaps(instanton200):
    row = instanton200.site_coefficients(1, 30)
    assert estimate_A(row).gaps == (1, 2, 3)
    assert estimate_K(row).gaps == (2, 3)
    b = estimate_B(row, 2)
    assert b.gaps == (3,)
    run = b.tail_run()
    assert run.start == 4 and len(run) == 25


def test_estimator_validation():
    row = planted_row(2, -2, 1, 1, 10)
    with pytest.raises(InsufficientData):
        estimate_A(row, j_max=9)
    with pytest.raises(ValueError):
        estimate_B(row, 0)
    with pytest.raises(ValueError):
        GrowthAnsatz(mpfr(-1), mpfr(0), mpfr(1), 1)


def test_ansatz_sign_convention():
    g = GrowthAnsatz(mpfr(2), mpfr(0), mpfr(1), 1)
    assert [g.coefficient(j) for j in (1, 2, 3)] == [-2, 4, -8]


# -- sign fits -----------------------------------------------------------------------

def cosine_signs(a, b, count, start=1):
    n = np.arange(start, start + count)
    return np.where(np.cos(a * n + b) > 0, 1, -1)


def test_synthetic_signs_score_full():
    s = cosine_signs(1.3941, 3.09, 300)
    fit = sign_score(s, 1.3941, 3.09)
    assert fit.score == 300 and fit.mismatches == ()


def test_score_counts_mismatches():
    s = cosine_signs(0.7, 0.2, 50)
    s[[4, 19]] *= -1
    fit = sign_score(s, 0.7, 0.2)
    assert fit.mismatches == (5, 20)
    assert fit.score == 50 - 2 * 2
    assert fit.as_dict() == {"a": 0.7, "b": 0.2, "score": 46, "mismatches": [5, 20]}


def test_ambiguous_phase():
    with pytest.raises(AmbiguousPhase):
        sign_score(np.ones(3, dtype=int), math.pi / 2, 0.0)


@given(st.lists(st.sampled_from([-1, 1]), min_size=1, max_size=120),
       st.floats(0.01, 12), st.floats(-4, 4))
def test_score_bound_parity_and_periodicity(signs, a, b):
    s = np.array(signs)
    try:
        f = sign_score(s, a, b)
        g = sign_score(s, a + TWO_PI, b)
        h = sign_score(s, a, b + TWO_PI)
    except AmbiguousPhase:
        return
    assert abs(f.score) <= len(s)
    assert f.score % 2 == len(s) % 2
    assert f.score == len(s) - 2 * len(f.mismatches)
    # a shift by 2 pi is exact only up to rounding of a n + b
    if min(abs(np.cos(a * np.arange(1, len(s) + 1) + b))) > 1e-6:
        assert f.score == g.score == h.score


def test_row_signs_rejects_zero(instanton200):
    with pytest.raises(ValueError):
        row_signs(instanton200.site_coefficients(1, 10))
    assert list(row_signs([1, -2, mpq(1, 3)])) == [-1, 1]


def test_grid_search_finds_planted_peak():
    s = cosine_signs(1.25, 0.4, 100)
    peaks = sign_grid_search(s, (1.0, 1.5), (0.0, 1.0), resolution=200, refine_depth=2)
    assert peaks and all(p.score == 100 for p in peaks)
    assert any(abs(p.a - 1.25) < 0.01 and abs(p.b - 0.4) < 0.05 for p in peaks)


def test_grid_search_constant_signs():
    s = np.ones(100, dtype=int)
    peaks = sign_grid_search(s, (0.0, 0.01), (-0.01, 0.01), resolution=20, refine_depth=1)
    assert peaks and all(p.score == 100 for p in peaks)
    with pytest.raises(ValueError):
        sign_grid_search(s, (1.0, 1.0), (0.0, 1.0))


def test_pure_cosine_on_synthetic_row():
    s = cosine_signs(0.9, 0.0, 200)
    s[36] *= -1
    fits = best_pure_cosine(s)
    assert fits and all(f.mismatches == (37,) for f in fits)
    assert any(f.a_lo < 0.9 < f.a_hi and f.b == 0.0 for f in fits)
    flipped = best_pure_cosine(-s)
    assert all(f.b == pytest.approx(math.pi) and f.mismatches == (37,) for f in flipped)


def test_peaks_json(tmp_path):
    path = tmp_path / "p.json"
    write_peaks_json([sign_score(cosine_signs(0.5, 0.1, 10), 0.5, 0.1)], path)
    assert json.loads(path.read_text())[0]["score"] == 10


def test_blasius_row_periodicity_and_peak(blasius300):
    s = row_signs(blasius300.site_coefficients(1))
    for a, b in [(1.3941, 3.09), (1.3939, 3.11), (7.67686, 3.13)]:
        f = sign_score(s, a, b)
        assert f.score == sign_score(s, a, b + TWO_PI).score
    peaks = sign_grid_search(s, (1.0, 2.0), (2.8, 3.3))
    assert peaks and max(p.score for p in peaks) == 300


def test_blasius_score_300_within_rounding_of_first_printed_pair(blasius300):
    s = row_signs(blasius300.site_coefficients(1))
    peaks = sign_grid_search(s, (1.39405, 1.39415), (3.085, 3.095), resolution=100,
                             refine_depth=1)
    assert max(p.score for p in peaks) == 300


# -- normalisation ---------------------------------------------------------------------

def test_normalize_blasius_first_entry(blasius300):
    nr = normalize_row(blasius300.site_coefficients(1), 1.3941, 3.09)
    assert abs(nr.aprime[0] - mpfr("8.83")) < mpfr("0.01")
    with precision(256):
        expected = -2 / gmpy2.cos(mpfr(1.3941) + mpfr(3.09))
    assert abs(nr.aprime[0] - expected) < mpfr("1e-60")
    assert nr.oscillation_onset is not None and nr.oscillation_onset <= 300


def test_normalize_synthetic_row_has_constant_ratio():
    a, b, c = 0.8, 0.3, mpq(3, 5)
    row = [mpq(1)]
    with precision(640):
        for j in range(1, 40):
            v = gmpy2.cos(mpfr(a) * j + mpfr(b)) * gmpy2.fac(j) * mpfr(c) ** j
            row.append(mpq(*v.as_integer_ratio()))
    nr = normalize_row(row, a, b)
    assert all(abs(r - mpfr(c, 256)) < mpfr("1e-60") for r in nr.ratios)
    assert nr.oscillation_onset is None


def test_normalize_ambiguous_phase():
    with pytest.raises(AmbiguousPhase):
        normalize_row([1, 1, 1], math.pi / 2, 0.0)


# -- zeta and convolution ----------------------------------------------------------------

def test_zeta_three_halves_against_partial_sum():
    k = np.arange(1, 10 ** 6 + 1, dtype=float)
    oracle = math.fsum(k ** -1.5) + 2 / math.sqrt(10 ** 6 + 0.5)
    z = zeta(mpq(3, 2))
    assert mpfr("2.6123753") <= z <= mpfr("2.6123754")
    assert abs(float(z) - oracle) < 1e-11


def test_zeta_known_values():
    with precision(256):
        assert abs(zeta(2) - gmpy2.const_pi() ** 2 / 6) < mpfr("1e-70")
        assert abs(zeta(4) - gmpy2.const_pi() ** 4 / 90) < mpfr("1e-70")
    with pytest.raises(ValueError):
        zeta(1)


def test_zeta_consistency():
    assert abs(zeta_consistency_K(0.0171, 0.1190) - mpfr("3.940")) < mpfr("0.001")
    assert zeta_consistency_K(0.001, 0) < 1
    with pytest.raises(NonPositiveB1):
        zeta_consistency_K(0, 0.1)


def test_convolution_limits():
    assert convolution_limit(0, "single") == 1
    assert convolution_limit(0, "double") == pytest.approx(0.5)
    assert convolution_limit(-0.5, "single") == pytest.approx(math.pi)
    z = float(zeta(mpq(3, 2)))
    assert convolution_limit(-1.5, "single") == pytest.approx(2 * z)
    assert convolution_limit(-1.5, "double") == pytest.approx(3 * z * z)
    with pytest.raises(ValueError):
        convolution_limit(-1, "single")
    with pytest.raises(ValueError):
        convolution_limit(0.5, "triple")


def test_convolution_sums_converge():
    assert convolution_sum(0, "single", 1000) == pytest.approx(0.999)
    vals = [convolution_sum(-1.5, "single", j) for j in (10 ** 3, 10 ** 4, 10 ** 5)]
    limit = convolution_limit(-1.5, "single")
    assert vals[0] < vals[1] < vals[2] < limit
    assert abs(vals[2] / limit - 1) < 0.01
    assert convolution_sum(-0.5, "single", 10 ** 4) == pytest.approx(math.pi, rel=0.02)
    assert convolution_sum(0.5, "double", 3000) == pytest.approx(
        convolution_limit(0.5, "double"), rel=1e-3)
    assert convolution_sum(-1.5, "double", 3000) == pytest.approx(
        convolution_limit(-1.5, "double"), rel=0.01)
    with pytest.raises(ValueError):
        convolution_sum(-1.5, "single", 3)


def test_double_sum_matches_direct_loop():
    A, j = -0.7, 40
    direct = sum(k ** A * l ** A * (j - k - l) ** A
                 for k in range(1, j) for l in range(1, j) if k + l < j)
    assert convolution_sum(A, "double", j) == pytest.approx(direct / j ** (3 * A + 2), rel=1e-12)
