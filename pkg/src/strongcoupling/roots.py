"""Positive real roots of polynomials with exact rational coefficients.

Roots are bracketed by a sign scan on a logarithmic grid between the
Fujiwara lower and upper root bounds, then bisected.  Bisection is run only
to ``coarse_bits`` for every bracket; callers refine the roots they keep.
Close root pairs that fall inside one grid cell are missed; the grid
density is a parameter for that reason.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from .exact import precision, rational

GUARD_BITS = 64


def _trim(coeffs):
    """Drop zero leading coefficients and zero roots.  Input is highest power first."""
    c = [rational(x) for x in coeffs]
    while c and c[0] == 0:
        c.pop(0)
    while c and c[-1] == 0:
        c.pop()
    return c


def fujiwara_bound(coeffs) -> mpfr:
    """Upper bound on |root| for a polynomial given highest power first."""
    c = _trim(coeffs)
    n = len(c) - 1
    if n < 1:
        return mpfr(0)
    lead = abs(c[0])
    best = mpfr(0)
    for i in range(1, n + 1):
        if c[i] == 0:
            continue
        ratio = abs(c[i]) / lead
        if i == n:
            ratio /= 2
        best = max(best, gmpy2.root(mpfr(ratio), i))
    return 2 * best


def horner(coeffs_f, u):
    acc = mpfr(0)
    for x in coeffs_f:
        acc = acc * u + x
    return acc


@dataclass(frozen=True)
class Bracket:
    lo: mpfr
    hi: mpfr


def isolate_positive_roots(coeffs, prec: int = 256, per_decade: int = 50) -> list:
    """Brackets [lo, hi] with a sign change of the polynomial, in increasing order."""
    c = _trim(coeffs)
    if len(c) < 2:
        return []
    with precision(prec + GUARD_BITS):
        cf = [mpfr(x) for x in c]
        upper = fujiwara_bound(c)
        lower = 1 / fujiwara_bound(c[::-1])
        # widen slightly so roots sitting on a bound are still bracketed
        upper *= mpfr("1.01")
        lower /= mpfr("1.01")
        decades = gmpy2.log10(upper / lower)
        steps = max(8, int(gmpy2.ceil(decades * per_decade)))
        ratio = gmpy2.exp(gmpy2.log(upper / lower) / steps)
        out = []
        u_prev, f_prev = lower, horner(cf, lower)
        for i in range(1, steps + 1):
            u = upper if i == steps else u_prev * ratio
            f = horner(cf, u)
            if f == 0:
                out.append(Bracket(u, u))
            elif f_prev != 0 and (f < 0) != (f_prev < 0):
                out.append(Bracket(u_prev, u))
            u_prev, f_prev = u, f
    return out


def refine_root(coeffs, bracket: Bracket, bits: int, prec: int = 256) -> mpfr:
    """Bisect ``bracket`` until its relative width is below 2**-bits."""
    c = _trim(coeffs)
    with precision(prec + GUARD_BITS):
        cf = [mpfr(x) for x in c]
        lo, hi = bracket.lo, bracket.hi
        if lo == hi:
            return mpfr(lo, prec)
        f_lo = horner(cf, lo)
        tol = mpfr(2) ** (-bits)
        while hi - lo > tol * hi:
            mid = (lo + hi) / 2
            if mid == lo or mid == hi:
                break
            f_mid = horner(cf, mid)
            if f_mid == 0:
                return mpfr(mid, prec)
            if (f_mid < 0) == (f_lo < 0):
                lo, f_lo = mid, f_mid
            else:
                hi = mid
        return mpfr((lo + hi) / 2, prec)


def positive_roots(coeffs, prec: int = 256, coarse_bits: int = 48,
                   per_decade: int = 50) -> list:
    """Approximate positive roots (relative accuracy 2**-coarse_bits), increasing."""
    return [refine_root(coeffs, b, coarse_bits, prec)
            for b in isolate_positive_roots(coeffs, prec, per_decade)]
