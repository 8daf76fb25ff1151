"""Variational perturbation theory for the leading strong-coupling coefficient.

For a weak-coupling series sum_n f_n delta**n whose strong-coupling
expansion starts as delta**(p/q) (b_0 + b_1 delta**(-2/q) + ...), the
square-root trick with variational scale k0 gives at order N

    b0_N(k0) = sum_{n=0}^N (-1)**(N-n) binom((p - n q)/2 - 1, N - n) f_n k0**(p - n q).

k0 is fixed where b0_N is least sensitive to it: the largest positive zero
of a k0-derivative.  Multiplying the d-th derivative by k0**(N q - p + d)
turns it into a degree-N polynomial in u = k0**q with exact coefficients,
whose positive roots are isolated by ``roots``.
"""

from __future__ import annotations

import csv
import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import gmpy2
from gmpy2 import mpfr, mpq

from .errors import NegativeRadicand, NonPositiveK0, NoRoot, SingularFormula
from .exact import DEFAULT_PREC, BigFloat, precision, rational
from .roots import GUARD_BITS, isolate_positive_roots, refine_root


class Strategy(enum.Enum):
    EXTREMUM = "extremum"                          # largest zero of d/dk0
    RIGHTMOST_INFLECTION = "rightmost-inflection"  # largest zero of d2/dk0^2
    RIGHTMOST_FLAT = "rightmost-flat"              # largest zero of the q-th derivative

    def derivative(self, q: int) -> int:
        if self is Strategy.EXTREMUM:
            return 1
        if self is Strategy.RIGHTMOST_INFLECTION:
            return 2
        return q


DEFAULT_STRATEGY = Strategy.RIGHTMOST_FLAT


@dataclass(frozen=True)
class VptProblem:
    f: tuple
    p: int
    q: int

    def __post_init__(self):
        object.__setattr__(self, "f", tuple(rational(x) for x in self.f))
        if self.q <= 0:
            raise ValueError("q must be positive")
        if not self.f:
            raise ValueError("need at least one coefficient")
        object.__setattr__(self, "_binoms", {})

    @property
    def max_order(self) -> int:
        return len(self.f) - 1

    def _binomials(self, n: int, k: int) -> list:
        # binom((p - n q)/2 - 1, i) for i = 0..k, extended on demand
        rows = self._binoms
        row = rows.setdefault(n, [mpq(1)])
        alpha = mpq(self.p - n * self.q, 2) - 1
        while len(row) <= k:
            i = len(row)
            row.append(row[-1] * (alpha - i + 1) / i)
        return row

    def term_coefficients(self, N: int) -> list:
        """Exact c_n with b0_N(k0) = sum_n c_n k0**(p - n q)."""
        if not 0 <= N <= self.max_order:
            raise ValueError(f"order {N} outside 0..{self.max_order}")
        out = []
        for n in range(N + 1):
            b = self._binomials(n, N - n)[N - n]
            sign = -1 if (N - n) % 2 else 1
            out.append(sign * b * self.f[n])
        return out

    def exponent(self, n: int) -> int:
        return self.p - n * self.q


def _falling(x: int, d: int) -> int:
    out = 1
    for i in range(d):
        out *= x - i
    return out


def _check_k0(k0):
    if k0 <= 0:
        raise NonPositiveK0(f"k0 must be positive, got {k0}")


def vpt_b0_deriv(problem: VptProblem, N: int, k0, d: int = 0,
                 prec: int = DEFAULT_PREC) -> BigFloat:
    """d-th k0-derivative of b0_N (d = 0 gives b0_N itself)."""
    _check_k0(k0)
    c = problem.term_coefficients(N)
    with precision(prec + GUARD_BITS):
        k = mpfr(k0)
        total = mpfr(0)
        for n, cn in enumerate(c):
            if cn:
                e = problem.exponent(n)
                total += mpfr(cn * _falling(e, d)) * k ** (e - d)
    return mpfr(total, prec)


def vpt_b0(problem: VptProblem, N: int, k0, prec: int = DEFAULT_PREC) -> BigFloat:
    return vpt_b0_deriv(problem, N, k0, 0, prec)


def derivative_polynomial(problem: VptProblem, N: int, d: int) -> list:
    """Exact coefficients of k0**(N q - p + d) * b0_N^(d)(k0) in u = k0**q, highest power first."""
    c = problem.term_coefficients(N)
    return [cn * _falling(problem.exponent(n), d) for n, cn in enumerate(c)]


def first_order_k0(problem: VptProblem, prec: int = DEFAULT_PREC) -> BigFloat:
    """Closed-form stationary point of b0_1."""
    p, q = problem.p, problem.q
    if len(problem.f) < 2:
        raise ValueError("need f_0 and f_1")
    f0, f1 = problem.f[0], problem.f[1]
    if p in (0, 2) or f0 == 0:
        raise SingularFormula("first-order formula needs p not in {0, 2} and f_0 != 0")
    radicand = 2 * f1 / f0 * mpq(p - q, p * (p - 2))
    if radicand <= 0:
        raise NegativeRadicand(f"radicand {radicand} is not positive")
    with precision(prec + GUARD_BITS):
        value = gmpy2.root(mpfr(radicand), q)
    return mpfr(value, prec)


@dataclass(frozen=True)
class VptResult:
    N: int
    k0: BigFloat
    b0: BigFloat
    strategy: Strategy
    derivative: int
    candidates: tuple = ()  # every positive zero of the selected derivative, in k0


def optimal_k0(problem: VptProblem, N: int, strategy: Optional[Strategy] = None,
               prec: int = DEFAULT_PREC, derivative: Optional[int] = None) -> VptResult:
    """Largest positive zero of the selected k0-derivative and b0_N there."""
    if N < 1:
        raise ValueError("N must be at least 1")
    strategy = DEFAULT_STRATEGY if strategy is None else strategy
    d = strategy.derivative(problem.q) if derivative is None else derivative
    poly = derivative_polynomial(problem, N, d)
    brackets = isolate_positive_roots(poly, prec)
    if not brackets:
        raise NoRoot(f"derivative {d} has no positive zero at N={N}")
    u = refine_root(poly, brackets[-1], prec + 8, prec)
    coarse = [refine_root(poly, b, 48, prec) for b in brackets[:-1]] + [u]
    with precision(prec + GUARD_BITS):
        k0 = mpfr(gmpy2.root(u, problem.q), prec)
        candidates = tuple(mpfr(gmpy2.root(x, problem.q), prec) for x in coarse)
    return VptResult(N, k0, vpt_b0(problem, N, k0, prec), strategy, d, candidates)


@dataclass
class VptSequence:
    results: list
    gaps: list = field(default_factory=list)  # (N, reason)

    def b0_values(self) -> list:
        return [r.b0 for r in self.results]

    def orders(self) -> list:
        return [r.N for r in self.results]

    def by_order(self, N: int) -> VptResult:
        for r in self.results:
            if r.N == N:
                return r
        raise KeyError(N)


def _vpt_worker(args):
    problem, N, strategy, prec, derivative = args
    try:
        return optimal_k0(problem, N, strategy, prec, derivative)
    except NoRoot as exc:
        return (N, str(exc))


def vpt_sequence(problem: VptProblem, N_max: int, strategy: Optional[Strategy] = None,
                 prec: int = DEFAULT_PREC, derivative: Optional[int] = None,
                 jobs: int = 1, N_min: int = 1) -> VptSequence:
    if N_max > problem.max_order:
        raise ValueError(f"N_max {N_max} exceeds available order {problem.max_order}")
    tasks = [(problem, N, strategy, prec, derivative) for N in range(N_min, N_max + 1)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            out = list(pool.map(_vpt_worker, tasks, chunksize=2))
    else:
        out = [_vpt_worker(t) for t in tasks]
    return VptSequence([r for r in out if isinstance(r, VptResult)],
                       [r for r in out if isinstance(r, tuple)])


def write_vpt_csv(seq: VptSequence, path, digits: int = 30) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["N", "k0", "b0", "strategy"])
        for r in seq.results:
            w.writerow([r.N, f"{r.k0:.{digits}g}", f"{r.b0:.{digits}g}", r.strategy.value])
