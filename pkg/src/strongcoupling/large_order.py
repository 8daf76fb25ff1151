"""Large-order behaviour of lattice series coefficients.

Instanton rows grow like a_j ~ (-1)**(j+1) B K**j j**A.  Ratio estimators
for A, K and B are formed at every order and extrapolated with Richardson.
Blasius rows are not sign-alternating; their sign pattern is fitted by
sgn(cos(a j + b)).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import gmpy2
import numpy as np
from gmpy2 import mpfr, mpq

from .accel import SequenceData, richardson_report
from .errors import AmbiguousPhase, InsufficientData, NonPositiveB1
from .exact import DEFAULT_PREC, precision, rational

GUARD_BITS = 32
PHASE_TOL = 1e-9


# -- growth estimators --------------------------------------------------------

@dataclass(frozen=True)
class EstimateSequence:
    """Estimates at orders ``indices``; ``gaps`` lists orders where the formula is undefined."""

    name: str
    indices: tuple
    values: tuple
    gaps: tuple = ()

    def tail_run(self) -> SequenceData:
        """Longest run of consecutive orders ending at the last estimate."""
        if not self.values:
            raise InsufficientData(f"no {self.name} estimates")
        i = len(self.indices) - 1
        while i > 0 and self.indices[i - 1] == self.indices[i] - 1:
            i -= 1
        return SequenceData(self.values[i:], self.indices[i])


def _row(row) -> list:
    return [rational(x) for x in row]


def _default_last(row, j_max):
    # every estimator shares j <= len(row) - 3 so the three sequences line up
    return len(row) - 3 if j_max is None else j_max


def estimate_A(row: Sequence, j_max: Optional[int] = None,
               prec: int = DEFAULT_PREC) -> EstimateSequence:
    """A_j = log(a_{j+2} a_j / a_{j+1}^2) / log(j (j+2) / (j+1)^2); row[j] = a_j."""
    a = _row(row)
    last = _default_last(a, j_max)
    if last + 2 >= len(a):
        raise InsufficientData(f"A at order {last} needs a_{last + 2}")
    idx, vals, gaps = [], [], []
    with precision(prec + GUARD_BITS):
        for j in range(1, last + 1):
            if a[j] == 0 or a[j + 1] == 0 or a[j + 2] == 0:
                gaps.append(j)
                continue
            num = gmpy2.log(abs(mpfr(a[j + 2] * a[j] / a[j + 1] ** 2)))
            den = gmpy2.log(mpfr(mpq(j * (j + 2), (j + 1) ** 2)))
            idx.append(j)
            vals.append(mpfr(num / den, prec))
    return EstimateSequence("A", tuple(idx), tuple(vals), tuple(gaps))


def estimate_K(row: Sequence, A=mpq(-3, 2), j_max: Optional[int] = None,
               prec: int = DEFAULT_PREC) -> EstimateSequence:
    """K_j = -(a_{j+1} / a_j) (j / (j+1))**A."""
    a = _row(row)
    last = _default_last(a, j_max)
    if last + 1 >= len(a):
        raise InsufficientData(f"K at order {last} needs a_{last + 1}")
    idx, vals, gaps = [], [], []
    with precision(prec + GUARD_BITS):
        A = mpfr(A)
        for j in range(1, last + 1):
            if a[j] == 0 or a[j + 1] == 0:
                gaps.append(j)
                continue
            v = -mpfr(a[j + 1] / a[j]) * mpfr(mpq(j, j + 1)) ** A
            idx.append(j)
            vals.append(mpfr(v, prec))
    return EstimateSequence("K", tuple(idx), tuple(vals), tuple(gaps))


def estimate_B(row: Sequence, K, A=mpq(-3, 2), j_max: Optional[int] = None,
               prec: int = DEFAULT_PREC) -> EstimateSequence:
    """B_j = |a_j| / (K**j j**A)."""
    a = _row(row)
    last = _default_last(a, j_max)
    idx, vals, gaps = [], [], []
    with precision(prec + GUARD_BITS):
        K, A = mpfr(K), mpfr(A)
        if K <= 0:
            raise ValueError("K must be positive")
        for j in range(1, last + 1):
            if a[j] == 0:
                gaps.append(j)
                continue
            v = abs(mpfr(a[j])) / (K ** j * mpfr(j) ** A)
            idx.append(j)
            vals.append(mpfr(v, prec))
    return EstimateSequence("B", tuple(idx), tuple(vals), tuple(gaps))


@dataclass(frozen=True)
class GrowthAnsatz:
    K: mpfr
    A: mpfr
    B: mpfr
    site: int

    def __post_init__(self):
        if self.K <= 0:
            raise ValueError("K must be positive")

    def coefficient(self, j: int) -> mpfr:
        """Planted form (-1)**(n+j+1) B K**j j**A."""
        sign = -1 if (self.site + j + 1) % 2 else 1
        return sign * self.B * self.K ** j * mpfr(j) ** self.A


@dataclass
class LargeOrderFit:
    site: int
    A_estimates: EstimateSequence
    K_estimates: EstimateSequence
    B_estimates: EstimateSequence
    A_report: list
    K_report: list
    B_report: list
    ansatz: GrowthAnsatz
    A_used: mpfr
    K_used: mpfr


def fit_growth(row: Sequence, site: int, k_max: int = 6, A=mpq(-3, 2), K=None,
               j_max: Optional[int] = None, prec: int = DEFAULT_PREC) -> LargeOrderFit:
    """Estimate A, then K at fixed ``A``, then B at ``K`` (default: extrapolated K).

    The extrapolated constants are the order-``k_max`` Richardson values.
    """
    a_est = estimate_A(row, j_max, prec)
    a_rep = richardson_report(a_est.tail_run(), k_max, prec=prec)
    k_est = estimate_K(row, A, j_max, prec)
    k_rep = richardson_report(k_est.tail_run(), k_max, prec=prec)
    K_used = k_rep[-1].value if K is None else mpfr(K, prec)
    b_est = estimate_B(row, K_used, A, j_max, prec)
    b_rep = richardson_report(b_est.tail_run(), k_max, prec=prec)
    ansatz = GrowthAnsatz(k_rep[-1].value, a_rep[-1].value, b_rep[-1].value, site)
    return LargeOrderFit(site, a_est, k_est, b_est, a_rep, k_rep, b_rep, ansatz,
                         mpfr(A, prec), K_used)


def write_estimates_csv(fit: LargeOrderFit, path, digits: int = 30) -> None:
    cols = {}
    for est in (fit.A_estimates, fit.K_estimates, fit.B_estimates):
        for j, v in zip(est.indices, est.values):
            cols.setdefault(j, {})[est.name] = f"{v:.{digits}g}"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["j", "A", "K", "B"])
        for j in sorted(cols):
            w.writerow([j] + [cols[j].get(x, "") for x in "AKB"])


# -- sign structure -----------------------------------------------------------

@dataclass(frozen=True)
class SignFit:
    a: float
    b: float
    score: int
    mismatches: tuple

    def as_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "score": self.score,
                "mismatches": list(self.mismatches)}


def row_signs(row: Sequence, start: int = 1) -> np.ndarray:
    """Signs of row[start:], refusing exact zeros."""
    vals = [rational(x) for x in row[start:]]
    if any(v == 0 for v in vals):
        zeros = [start + i for i, v in enumerate(vals) if v == 0]
        raise ValueError(f"zero coefficients at orders {zeros}")
    return np.array([1 if v > 0 else -1 for v in vals], dtype=np.int64)


def sign_score(signs: np.ndarray, a: float, b: float, start: int = 1,
               tol: float = PHASE_TOL) -> SignFit:
    """f(a, b) = sum_n sgn(cos(a n + b)) sgn(a_n) with the orders where they disagree."""
    n = np.arange(start, start + len(signs))
    c = np.cos(a * n + b)
    if np.min(np.abs(c)) < tol:
        bad = n[np.abs(c) < tol].tolist()
        raise AmbiguousPhase(f"cos(a n + b) vanishes within {tol} at n = {bad}")
    s = np.where(c > 0, 1, -1)
    miss = n[s != signs]
    return SignFit(float(a), float(b), int(np.sum(s * signs)), tuple(int(x) for x in miss))


def _scores_along_b(signs, n, a, bgrid):
    # For fixed a, the score is piecewise constant in b: term n enters its
    # positive arc at b = -pi/2 - a n and leaves at pi/2 - a n (mod 2 pi).
    two_pi = 2 * np.pi
    theta = a * n
    enter = np.mod(-np.pi / 2 - theta, two_pi)
    leave = np.mod(np.pi / 2 - theta, two_pi)
    base = np.sum(np.where(np.cos(theta) > 0, 1, -1) * signs)
    events = np.concatenate([enter, leave])
    jumps = np.concatenate([2 * signs, -2 * signs])
    order = np.argsort(events, kind="stable")
    cum = np.concatenate([[0], np.cumsum(jumps[order])])
    pos = np.searchsorted(events[order], np.mod(bgrid, two_pi), side="right")
    return base + cum[pos]


def _grid(lo, hi, res):
    step = (hi - lo) / res
    return lo + (np.arange(res) + 0.5) * step, step


def _grid_scores(signs, n, a_vals, b_vals):
    return np.array([_scores_along_b(signs, n, a, b_vals) for a in a_vals])


def sign_grid_search(signs: np.ndarray, a_range, b_range, resolution: int = 2000,
                     refine_depth: int = 3, zoom: int = 10, start: int = 1,
                     merge_tol: float = 1e-4, max_candidates: int = 64) -> list:
    """Peaks of the sign score over a rectangle of the (a, b) plane.

    The rectangle is sampled at cell centres; cells reaching the best score
    (up to ``max_candidates`` of them) are re-gridded ``refine_depth`` times,
    each time over their own cell and its neighbours at ``zoom`` times finer
    spacing.  Peaks closer than ``merge_tol`` in both coordinates are merged.
    """
    if not (a_range[1] > a_range[0] and b_range[1] > b_range[0]):
        raise ValueError("ranges must have positive length")
    n = np.arange(start, start + len(signs), dtype=float)
    a_vals, da = _grid(a_range[0], a_range[1], resolution)
    b_vals, db = _grid(b_range[0], b_range[1], resolution)
    S = _grid_scores(signs, n, a_vals, b_vals)
    best = S.max()
    cands = [(a_vals[i], b_vals[k]) for i, k in np.argwhere(S == best)[:max_candidates]]

    for _ in range(refine_depth):
        sub = 2 * zoom
        found = []
        for a0, b0 in cands:
            av, _ = _grid(a0 - da, a0 + da, sub)
            bv, _ = _grid(b0 - db, b0 + db, sub)
            T = _grid_scores(signs, n, av, bv)
            found.extend((T[i, k], av[i], bv[k]) for i, k in np.argwhere(T == T.max()))
        top = max(f[0] for f in found)
        best = max(best, top)
        cands = [(x, y) for s, x, y in found if s == top][:max_candidates]
        da, db = da / zoom, db / zoom

    peaks = []
    for a0, b0 in cands:
        if any(abs(a0 - p[0]) < merge_tol and abs(b0 - p[1]) < merge_tol for p in peaks):
            continue
        peaks.append((a0, b0))
    out = []
    for a0, b0 in peaks:
        try:
            out.append(sign_score(signs, a0, b0, start))
        except AmbiguousPhase:
            continue
    return out


@dataclass(frozen=True)
class PureCosineFit:
    """Best fit with the phase restricted to b in {0, pi}: an interval of a values."""

    a_lo: float
    a_hi: float
    b: float
    score: int
    mismatches: tuple


def best_pure_cosine(signs: np.ndarray, a_range=(0.0, np.pi), start: int = 1,
                     chunk: int = 4096) -> list:
    """All maximal-score intervals of a for sgn(cos(a n)) or sgn(-cos(a n)).

    The score only changes where a n = (m + 1/2) pi, so it is evaluated once
    between each pair of consecutive breakpoints.
    """
    n = np.arange(start, start + len(signs), dtype=float)
    lo, hi = a_range
    bps = [np.array([lo, hi])]
    for k in n:
        m = np.arange(math.floor(lo * k / np.pi - 0.5), math.ceil(hi * k / np.pi - 0.5) + 1)
        x = (m + 0.5) * np.pi / k
        bps.append(x[(x > lo) & (x < hi)])
    edges = np.unique(np.concatenate(bps))
    mids = (edges[:-1] + edges[1:]) / 2
    S = np.empty(len(mids), dtype=np.int64)
    for i in range(0, len(mids), chunk):
        block = np.where(np.cos(np.outer(mids[i:i + chunk], n)) > 0, 1, -1)
        S[i:i + chunk] = block @ signs
    top = np.abs(S).max()
    out = []
    for i in np.flatnonzero(np.abs(S) == top):
        b = 0.0 if S[i] > 0 else float(np.pi)
        fit = sign_score(signs, float(mids[i]), b, start)
        out.append(PureCosineFit(float(edges[i]), float(edges[i + 1]), b, fit.score,
                                 fit.mismatches))
    return out


def write_peaks_json(fits, path) -> None:
    with open(path, "w") as fh:
        json.dump([f.as_dict() for f in fits], fh, indent=2)
        fh.write("\n")


@dataclass
class NormalizedRow:
    aprime: list       # a_j / cos(a j + b)
    bnorm: list        # aprime_j / j!
    ratios: list       # bnorm_{j+1} / bnorm_j, starting at j = start
    oscillation_onset: Optional[int]  # first j where the ratio sequence turns


def normalize_row(row: Sequence, a, b, start: int = 1, prec: int = DEFAULT_PREC,
                  tol: float = PHASE_TOL, rel_noise=mpfr("1e-30")) -> NormalizedRow:
    """Strip the cosine sign pattern and the factorial growth from row[start:]."""
    vals = [rational(x) for x in row]
    aprime, bnorm = [], []
    with precision(prec + GUARD_BITS):
        a, b = mpfr(a), mpfr(b)
        for j in range(start, len(vals)):
            c = gmpy2.cos(a * j + b)
            if abs(c) < tol:
                raise AmbiguousPhase(f"cos(a j + b) vanishes at j = {j}")
            ap = mpfr(vals[j]) / c
            aprime.append(ap)
            bnorm.append(ap / gmpy2.fac(j))
        ratios = [y / x for x, y in zip(bnorm, bnorm[1:])]
        onset = None
        prev = 0
        for i in range(1, len(ratios)):
            d = ratios[i] - ratios[i - 1]
            if abs(d) <= rel_noise * abs(ratios[i]):
                continue
            s = 1 if d > 0 else -1
            if prev and s != prev:
                onset = start + i
                break
            prev = s
    return NormalizedRow([mpfr(x, prec) for x in aprime], [mpfr(x, prec) for x in bnorm],
                         [mpfr(x, prec) for x in ratios], onset)


# -- zeta consistency ---------------------------------------------------------

def _bernoulli_even(m: int) -> list:
    """B_0, B_2, ..., B_{2m} as exact rationals."""
    B = [mpq(1)]
    for n in range(1, 2 * m + 1):
        s = mpq(0)
        for k in range(n):
            s += gmpy2.comb(n + 1, k) * B[k]
        B.append(-s / (n + 1))
    return [B[2 * k] for k in range(m + 1)]


def zeta(s, prec: int = DEFAULT_PREC, terms: int = 64, corrections: int = 40) -> mpfr:
    """Riemann zeta for real s > 1: partial sum plus Euler-Maclaurin tail."""
    with precision(prec + GUARD_BITS):
        s = mpfr(s)
        if s <= 1:
            raise ValueError("zeta is implemented for s > 1 only")
        N = terms
        total = mpfr(0)
        for k in range(1, N):
            total += mpfr(k) ** (-s)
        total += mpfr(N) ** (1 - s) / (s - 1) + mpfr(N) ** (-s) / 2
        rising = s  # s (s+1) ... (s + 2k - 2)
        for k, b2k in enumerate(_bernoulli_even(corrections)[1:], start=1):
            term = mpfr(b2k) / gmpy2.fac(2 * k) * rising * mpfr(N) ** (-s - 2 * k + 1)
            total += term
            rising *= (s + 2 * k - 1) * (s + 2 * k)
    return mpfr(total, prec)


def zeta_consistency_K(B1, B2, prec: int = DEFAULT_PREC) -> mpfr:
    """K predicted by matching the convolution structure with B_1 and B_2 at A = -3/2."""
    if B1 <= 0:
        raise NonPositiveB1(f"B1 must be positive, got {B1}")
    with precision(prec + GUARD_BITS):
        B1, B2 = mpfr(B1), mpfr(B2)
        z = zeta(mpq(3, 2), prec)
        K = (1 + B2 / (2 * B1)) / (1 + 3 * z * B1 + mpfr(3) / 2 * z ** 2 * B1 ** 2)
    return mpfr(K, prec)


# -- convolution sums ---------------------------------------------------------

def _conv_norm(A: float, variant: str, j: int) -> float:
    if A < -1:
        return float(j) ** A
    if variant == "single":
        return float(j) ** (2 * A + 1)
    return float(j) ** (3 * A + 2)


def convolution_sum(A: float, variant: str, j: int) -> float:
    """Normalized sum_k k^A (j-k)^A, or the double sum over k + l < j.

    Divided by j**A when A < -1 (dominated by the edges) and by
    j**(2A+1) or j**(3A+2) when A > -1 (a Riemann sum of a Beta integral).
    """
    if j < 4:
        raise ValueError("j must be at least 4")
    if variant not in ("single", "double"):
        raise ValueError("variant must be 'single' or 'double'")
    if A == -1:
        raise ValueError("A = -1 is the logarithmic boundary case")
    k = np.arange(1, j, dtype=float)
    p = k ** A
    if variant == "single":
        total = float(np.dot(p, p[::-1]))
    else:
        # c[m] = sum_{k=1}^{m-1} k^A (m-k)^A for m = 2..j-1, then sum_m c[m] (j-m)^A
        c = np.convolve(p, p)[: j - 2]  # index i -> m = i + 2
        m = np.arange(2, j)
        total = float(np.dot(c, (j - m).astype(float) ** A))
    return total / _conv_norm(A, variant, j)


def convolution_limit(A: float, variant: str, prec: int = 64) -> float:
    if variant not in ("single", "double"):
        raise ValueError("variant must be 'single' or 'double'")
    if A == -1:
        raise ValueError("A = -1 is the logarithmic boundary case")
    if A < -1:
        z = float(zeta(-A, prec))
        return 2 * z if variant == "single" else 3 * z * z
    g = math.gamma(A + 1)
    if variant == "single":
        return g * g / math.gamma(2 * A + 2)
    return g ** 3 / math.gamma(3 * A + 3)
