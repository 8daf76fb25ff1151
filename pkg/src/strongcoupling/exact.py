"""Exact rationals, truncated power series and high-precision scalars.

Rationals are ``gmpy2.mpq`` (always reduced, positive denominator) and
binary floats are ``gmpy2.mpfr``.  Series algebra is exact; conversion to
floating point happens only when a final scalar is needed.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from .errors import NonUnitLeadingCoefficient, ZeroBase

DEFAULT_PREC = 256

Rational = type(mpq())
BigFloat = type(mpfr())

_ZERO = mpq(0)
_ONE = mpq(1)


def rational(x) -> Rational:
    """Coerce ints, ``Fraction``, ``mpq`` or ``"num/den"`` strings to ``mpq``."""
    if isinstance(x, Rational):
        return x
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, (int, type(mpz()))):
        return mpq(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def parse_rational(text: str) -> Rational:
    """Parse ``"num/den"`` or a plain integer.  Non-reduced input is normalized."""
    s = text.strip()
    if not s:
        raise ValueError("empty rational")
    num, sep, den = s.partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"not a rational: {text!r}") from None
    if d == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return mpq(n, d)


def format_rational(r) -> str:
    r = rational(r)
    return f"{r.numerator}/{r.denominator}"


@contextlib.contextmanager
def precision(bits: int):
    """Temporarily set the mpfr working precision (in mantissa bits)."""
    with gmpy2.context(gmpy2.get_context(), precision=bits) as ctx:
        yield ctx


def to_bigfloat(x, prec: int = DEFAULT_PREC) -> BigFloat:
    """Correctly rounded conversion of a rational (or float) to ``prec`` bits."""
    if isinstance(x, (Rational, int, type(mpz()), Fraction, str)):
        x = rational(x)
    return mpfr(x, prec)


def _log_int(n: int, prec: int) -> BigFloat:
    # Shift off the low bits first: log(n) = log(n >> s) + s*log(2).  The
    # discarded bits perturb log by < 2**-(prec+64).
    n = mpz(n)
    s = max(0, n.bit_length() - (prec + 64))
    head = mpfr(n >> s)
    return gmpy2.log(head) + s * gmpy2.const_log2()


def log_abs_rational(r, prec: int = DEFAULT_PREC) -> BigFloat:
    """``ln|r|`` for a nonzero rational of any size."""
    r = rational(r)
    if r == 0:
        raise ZeroBase("logarithm of zero")
    with precision(prec + 32):
        value = _log_int(abs(r.numerator), prec) - _log_int(r.denominator, prec)
    return mpfr(value, prec)


@dataclass(frozen=True)
class ComplexValue:
    """A complex number with mpfr parts; ``is_real`` iff the imaginary part is 0."""

    re: BigFloat
    im: BigFloat

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __abs__(self) -> BigFloat:
        return gmpy2.hypot(self.re, self.im)

    def __str__(self) -> str:
        if self.is_real:
            return str(self.re)
        sign = "-" if self.im < 0 else "+"
        return f"{self.re} {sign} {abs(self.im)}i"


def principal_power(c, e, prec: int = DEFAULT_PREC) -> ComplexValue:
    """``exp(e * log c)`` on the principal branch (``log c = ln|c| + i*pi`` for c < 0)."""
    c = rational(c)
    e = rational(e)
    if c == 0:
        raise ZeroBase("principal_power of zero")
    with precision(prec + 32):
        mag = gmpy2.exp(mpfr(e) * log_abs_rational(c, prec + 32))
        if c > 0:
            re, im = mag, mpfr(0)
        elif e.denominator == 1:
            re, im = (mag if e.numerator % 2 == 0 else -mag), mpfr(0)
        elif e.denominator == 2:
            # e = m/2 with m odd: the result is purely imaginary
            re, im = mpfr(0), (mag if e.numerator % 4 == 1 else -mag)
        else:
            theta = gmpy2.const_pi() * mpfr(e)
            re, im = mag * gmpy2.cos(theta), mag * gmpy2.sin(theta)
    return ComplexValue(mpfr(re, prec), mpfr(im, prec))


def gen_binomial(alpha, k: int) -> Rational:
    """Generalized binomial ``alpha(alpha-1)...(alpha-k+1) / k!``, exact."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    alpha = rational(alpha)
    num = _ONE
    for i in range(k):
        num *= alpha - i
    return num / gmpy2.fac(k)


@dataclass(frozen=True)
class PowerSeries:
    """Truncated series ``sum_i c_i delta**i`` with exact rational coefficients."""

    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(rational(c) for c in self.coefficients)
        if not coeffs:
            raise ValueError("a power series needs at least one coefficient")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def of(cls, *coefficients) -> "PowerSeries":
        return cls(tuple(coefficients))

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def __len__(self) -> int:
        return len(self.coefficients)

    def __getitem__(self, i):
        return self.coefficients[i]

    def __iter__(self) -> Iterator[Rational]:
        return iter(self.coefficients)

    def truncate(self, order: int) -> "PowerSeries":
        if order > self.order:
            raise ValueError(f"cannot truncate order-{self.order} series to order {order}")
        return PowerSeries(self.coefficients[: order + 1])

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coefficients):
            if c == 0 and i > 0:
                continue
            terms.append(str(c) if i == 0 else f"{c}*d^{i}" if i > 1 else f"{c}*d")
        return " + ".join(terms) + f" + O(d^{self.order + 1})"


def _check_order(order: int, *series: PowerSeries) -> None:
    if order < 0:
        raise ValueError("order must be nonnegative")
    limit = min(s.order for s in series)
    if order > limit:
        raise ValueError(f"order {order} exceeds available order {limit}")


def series_mul(u: PowerSeries, v: PowerSeries, order: int) -> PowerSeries:
    """Cauchy product of ``u`` and ``v`` truncated at ``order``."""
    _check_order(order, u, v)
    a, b = u.coefficients, v.coefficients
    out = []
    for n in range(order + 1):
        s = _ZERO
        for k in range(n + 1):
            if a[k] and b[n - k]:
                s += a[k] * b[n - k]
        out.append(s)
    return PowerSeries(tuple(out))


def series_pow(u: PowerSeries, alpha, order: int) -> PowerSeries:
    """``u**alpha`` for a series with constant term 1, exact through ``order``.

    Uses the recurrence obtained from ``u w' = alpha u' w``:
    ``n w_n = sum_{k=1..n} ((alpha+1) k - n) u_k w_{n-k}``.
    """
    _check_order(order, u)
    if u.coefficients[0] != 1:
        raise NonUnitLeadingCoefficient(
            f"series_pow needs constant term 1, got {u.coefficients[0]}")
    alpha = rational(alpha)
    c = u.coefficients
    nz = [k for k in range(1, order + 1) if c[k]]
    ap1 = alpha + 1
    w = [_ONE]
    for n in range(1, order + 1):
        s = _ZERO
        for k in nz:
            if k > n:
                break
            if w[n - k]:
                s += (ap1 * k - n) * c[k] * w[n - k]
        w.append(s / n)
    return PowerSeries(tuple(w))
