"""Richardson extrapolation of sequences with inverse-power tails.

    R_n^(k) = sum_{j=0}^k (-1)**(j+k) A_{n+j} (n+j)**k / (j! (k-j)!)

annihilates c_1/n + ... + c_k/n**k exactly.  The value reported for each
order is the last transformed entry.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr, mpq

from .errors import InsufficientData
from .exact import DEFAULT_PREC, precision

GUARD_BITS = 64
FLAG_WINDOW = 10


@dataclass(frozen=True)
class SequenceData:
    """Values A_n for n = start, start+1, ..."""

    values: tuple
    start: int = 1

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise InsufficientData("empty sequence")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def indices(self) -> range:
        return range(self.start, self.start + len(self.values))

    @property
    def last(self):
        return self.values[-1]


def richardson(seq: SequenceData, k: int, prec: int = DEFAULT_PREC) -> SequenceData:
    if k < 1:
        raise ValueError("Richardson order must be at least 1")
    if len(seq) < max(2, k + 1):
        raise InsufficientData(f"order {k} needs {max(2, k + 1)} values, got {len(seq)}")
    weights = [mpq((-1) ** (j + k), gmpy2.fac(j) * gmpy2.fac(k - j)) for j in range(k + 1)]
    out = []
    with precision(prec + GUARD_BITS):
        vals = [mpfr(v) for v in seq.values]
        for i in range(len(vals) - k):
            n = seq.start + i
            acc = mpfr(0)
            for j, w in enumerate(weights):
                acc += mpfr(w * (n + j) ** k) * vals[i + j]
            out.append(mpfr(acc, prec))
    return SequenceData(tuple(out), seq.start)


def monotonicity(values, window: int = FLAG_WINDOW) -> str:
    """'increasing', 'decreasing' or 'oscillating' over the final ``window`` entries.

    Compared by magnitude, so a negative sequence creeping toward zero reads
    as decreasing.
    """
    tail = list(values[-window:])
    # abs() rounds to the context precision, so work at the inputs' own
    with precision(max(getattr(v, "precision", 53) for v in tail)):
        tail = [abs(mpfr(v)) for v in tail]
    pairs = list(zip(tail, tail[1:]))
    if all(b > a for a, b in pairs):
        return "increasing"
    if all(b < a for a, b in pairs):
        return "decreasing"
    return "oscillating"


@dataclass(frozen=True)
class RichardsonRow:
    k: int
    value: mpfr
    flag: str


def richardson_report(seq: SequenceData, k_max: int, window: int = FLAG_WINDOW,
                      prec: int = DEFAULT_PREC) -> list:
    if len(seq) < k_max + window:
        raise InsufficientData(
            f"a report to order {k_max} needs {k_max + window} values, got {len(seq)}")
    rows = []
    for k in range(1, k_max + 1):
        r = richardson(seq, k, prec)
        rows.append(RichardsonRow(k, r.last, monotonicity(r.values, window)))
    return rows


def write_report_csv(rows, path, digits: int = 30) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "value", "flag"])
        for r in rows:
            w.writerow([r.k, f"{r.value:.{digits}g}", r.flag])
