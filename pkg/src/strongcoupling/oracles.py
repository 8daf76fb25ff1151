"""Continuum reference solutions.

Instanton: eps^2 f'' + f - f^3 = 0, f(0) = 0, f(inf) = 1, solved by
f = tanh(x / (eps sqrt 2)).

Blasius: 2 eps y''' + y y'' = 0, y(0) = y'(0) = 0, y'(inf) = 1, solved by
shooting on s = y''(0) with fixed-step RK4 and a secant iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import gmpy2
from gmpy2 import mpfr

from .errors import DomainTooShort, NoConvergence, NonPositiveEpsilon
from .exact import DEFAULT_PREC, precision


def _check_eps(epsilon):
    if not epsilon > 0:
        raise NonPositiveEpsilon(f"epsilon must be positive, got {epsilon}")


def instanton_slope(epsilon=1, prec: int = DEFAULT_PREC) -> mpfr:
    """f'(0) = 1 / (eps sqrt 2)."""
    _check_eps(epsilon)
    with precision(prec + 16):
        v = 1 / (mpfr(epsilon) * gmpy2.sqrt(mpfr(2)))
    return mpfr(v, prec)


def instanton_profile(x, epsilon=1, prec: int = DEFAULT_PREC) -> tuple:
    """(f, f', f'') of tanh(x / (eps sqrt 2)) at x."""
    _check_eps(epsilon)
    with precision(prec + 16):
        eps = mpfr(epsilon)
        c = 1 / (eps * gmpy2.sqrt(mpfr(2)))
        t = gmpy2.tanh(c * mpfr(x))
        sech2 = 1 - t * t
        f1 = c * sech2
        f2 = -2 * c * c * t * sech2
    return mpfr(t, prec), mpfr(f1, prec), mpfr(f2, prec)


@dataclass(frozen=True)
class ShootingConfig:
    """Blasius shooting parameters; L and h default to 10 sqrt(eps) and 1e-3 sqrt(eps)."""

    epsilon: float = 1.0
    L: Optional[float] = None
    h: Optional[float] = None
    tol: float = 1e-12
    max_iter: int = 60
    min_sensitivity: float = 1e-8
    layer_tol: float = 1e-3

    def __post_init__(self):
        _check_eps(self.epsilon)
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        steps = self.length / self.step
        if abs(steps - round(steps)) > 1e-6 * steps:
            raise ValueError(f"L/h = {steps} is not an integer")

    @property
    def length(self) -> float:
        return 10 * math.sqrt(self.epsilon) if self.L is None else float(self.L)

    @property
    def step(self) -> float:
        return 1e-3 * math.sqrt(self.epsilon) if self.h is None else float(self.h)

    @property
    def steps(self) -> int:
        return int(round(self.length / self.step))


def _integrate(s: float, cfg: ShootingConfig) -> tuple:
    """RK4 for (y, y', y'') from 0 to L with y''(0) = s."""
    k = 1 / (2 * cfg.epsilon)
    h = cfg.step
    y, p, q = 0.0, 0.0, s
    for _ in range(cfg.steps):
        # y' = p, p' = q, q' = -y q / (2 eps)
        k1y, k1p, k1q = p, q, -k * y * q
        y2, p2, q2 = y + h / 2 * k1y, p + h / 2 * k1p, q + h / 2 * k1q
        k2y, k2p, k2q = p2, q2, -k * y2 * q2
        y3, p3, q3 = y + h / 2 * k2y, p + h / 2 * k2p, q + h / 2 * k2q
        k3y, k3p, k3q = p3, q3, -k * y3 * q3
        y4, p4, q4 = y + h * k3y, p + h * k3p, q + h * k3q
        k4y, k4p, k4q = p4, q4, -k * y4 * q4
        y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y)
        p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        q += h / 6 * (k1q + 2 * k2q + 2 * k3q + k4q)
    return y, p, q


def blasius_shoot(config: Optional[ShootingConfig] = None) -> float:
    """y''(0) such that y'(L) = 1."""
    cfg = ShootingConfig() if config is None else config
    s0 = 0.3 / math.sqrt(cfg.epsilon)
    s1 = 0.4 / math.sqrt(cfg.epsilon)
    g0 = _integrate(s0, cfg)[1] - 1
    g1 = _integrate(s1, cfg)[1] - 1
    for _ in range(cfg.max_iter):
        slope = (g1 - g0) / (s1 - s0)
        if abs(slope) < cfg.min_sensitivity:
            raise DomainTooShort(f"y'(L) is insensitive to y''(0) (slope {slope:.3g})")
        s2 = s1 - g1 / slope
        if s2 <= 0:
            s2 = s1 / 2
        s0, g0 = s1, g1
        s1 = s2
        _, p, q = _integrate(s1, cfg)
        g1 = p - 1
        if abs(s1 - s0) <= cfg.tol * abs(s1):
            if abs(q) > cfg.layer_tol * s1:
                raise DomainTooShort(
                    f"y''(L) = {q:.3g} has not decayed; the boundary layer is cut off")
            return s1
    raise NoConvergence(f"secant iteration did not converge in {cfg.max_iter} steps")
