"""Strong-coupling approximants from a weak-coupling series.

Given S(delta) = delta**M * (1 + a_1 delta + a_2 delta**2 + ...) with a finite
limit C as delta -> infinity, raise the bracket to the power -N/M and keep
N terms.  In the limit only the last coefficient c_N survives, so

    S_N = c_N ** (-M/N),

evaluated on the principal branch.  A negative c_N makes S_N complex.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from gmpy2 import mpfr

from .errors import DegenerateCoefficient, NonUnitLeadingCoefficient
from .exact import (DEFAULT_PREC, ComplexValue, PowerSeries, Rational, format_rational,
                    principal_power, rational, series_pow)


@dataclass(frozen=True)
class FrobeniusSeries:
    coefficients: PowerSeries
    M: Rational

    def __post_init__(self):
        if not isinstance(self.coefficients, PowerSeries):
            object.__setattr__(self, "coefficients", PowerSeries(tuple(self.coefficients)))
        object.__setattr__(self, "M", rational(self.M))
        if self.coefficients[0] != 1:
            raise NonUnitLeadingCoefficient(
                f"constant term must be 1, got {self.coefficients[0]}")
        if self.M == 0:
            raise ValueError("Frobenius exponent M must be nonzero")


@dataclass(frozen=True)
class ApproximantRecord:
    N: int
    c_N: Rational
    S_N: ComplexValue

    @property
    def is_real(self) -> bool:
        return self.S_N.is_real


def strong_coupling_approximant(series: FrobeniusSeries, N: int,
                                prec: int = DEFAULT_PREC) -> ApproximantRecord:
    if not 1 <= N <= series.coefficients.order:
        raise ValueError(f"N must lie in 1..{series.coefficients.order}, got {N}")
    w = series_pow(series.coefficients.truncate(N), -rational(N) / series.M, N)
    c = w[N]
    if c == 0:
        raise DegenerateCoefficient(f"surviving coefficient vanishes at N={N}")
    return ApproximantRecord(N, c, principal_power(c, -series.M / N, prec))


@dataclass
class SweepResult:
    records: list
    gaps: list = field(default_factory=list)  # orders with c_N == 0
    reference: Optional[object] = None

    def real_records(self) -> list:
        return [r for r in self.records if r.is_real]

    def local_minima(self) -> list:
        """Real records lower than both real neighbours at adjacent orders."""
        by_n = {r.N: r for r in self.records if r.is_real}
        out = []
        for n, r in sorted(by_n.items()):
            lo, hi = by_n.get(n - 1), by_n.get(n + 1)
            if lo is not None and hi is not None and r.S_N.re < lo.S_N.re and r.S_N.re < hi.S_N.re:
                out.append(r)
        return out

    def minimum(self) -> Optional[ApproximantRecord]:
        """First local minimum of the real sequence, where the descent first turns."""
        minima = self.local_minima()
        return minima[0] if minima else None

    def global_minimum(self) -> Optional[ApproximantRecord]:
        real = self.real_records()
        return min(real, key=lambda r: (r.S_N.re, r.N)) if real else None

    def crossings(self, reference=None) -> list:
        """(N, direction) for consecutive real approximants straddling ``reference``.

        N is the later order of the pair and direction is "up" or "down".
        Pairs separated by a complex window or a gap are not compared.
        """
        ref = self.reference if reference is None else reference
        if ref is None:
            return []
        ref = mpfr(ref)
        out = []
        for prev, cur in zip(self.records, self.records[1:]):
            if cur.N != prev.N + 1 or not (prev.is_real and cur.is_real):
                continue
            a, b = prev.S_N.re - ref, cur.S_N.re - ref
            if a < 0 <= b:
                out.append((cur.N, "up"))
            elif a >= 0 > b:
                out.append((cur.N, "down"))
        return out

    def complex_windows(self) -> list:
        """Maximal runs of complex approximants as (first complex N, first real-again N).

        The second entry is None when the sweep ends inside the window.
        """
        windows = []
        start = None
        for r in self.records:
            if not r.is_real and start is None:
                start = r.N
            elif r.is_real and start is not None:
                windows.append((start, r.N))
                start = None
        if start is not None:
            windows.append((start, None))
        return windows


def _approx_worker(args):
    series, N, prec = args
    try:
        return strong_coupling_approximant(series, N, prec)
    except DegenerateCoefficient:
        return N


def approximant_sweep(series: FrobeniusSeries, N_max: int, reference=None,
                      prec: int = DEFAULT_PREC, jobs: int = 1) -> SweepResult:
    if N_max > series.coefficients.order:
        raise ValueError(f"N_max {N_max} exceeds series order {series.coefficients.order}")
    tasks = [(series, N, prec) for N in range(1, N_max + 1)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_approx_worker, tasks, chunksize=4))
    else:
        results = [_approx_worker(t) for t in tasks]
    records = [r for r in results if isinstance(r, ApproximantRecord)]
    gaps = [r for r in results if isinstance(r, int)]
    return SweepResult(records, gaps, reference)


def write_sweep_csv(sweep: SweepResult, path, digits: int = 30) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["N", "c_N", "re_S", "im_S", "is_real"])
        for r in sweep.records:
            w.writerow([r.N, format_rational(r.c_N), f"{r.S_N.re:.{digits}g}",
                        f"{r.S_N.im:.{digits}g}", int(r.is_real)])
