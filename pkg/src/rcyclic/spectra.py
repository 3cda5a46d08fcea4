"""Closed-form laws: Marchenko-Pastur, free differences of MP laws, shifted semicircles."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .cumulant_core import cumulants_to_moments, single_variable
from .ncpart import NC_CAP, ResourceLimitError


@dataclass(frozen=True)
class MPParams:
    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("MP parameter must be positive")

    @property
    def a(self) -> float:
        return (1 - math.sqrt(self.c)) ** 2

    @property
    def b(self) -> float:
        return (1 + math.sqrt(self.c)) ** 2

    @property
    def atom(self) -> float:
        """Mass of the atom at 0 (present only when c < 1)."""
        return max(0.0, 1 - self.c)


def mp_density(c: float, t: float) -> float:
    """Absolutely continuous part of MP_c at ``t``; the atom is reported by :class:`MPParams`."""
    p = MPParams(c)
    if t <= 0 or t < p.a or t > p.b:
        return 0.0
    return math.sqrt(max(0.0, (p.b - t) * (t - p.a))) / (2 * math.pi * t)


class CumulantSequence:
    """A rule ``n -> kappa_n`` for the free cumulants of a single variable."""

    def __init__(self, rule: Callable[[int], object], cap: int = NC_CAP):
        self.rule = rule
        self.cap = cap

    def __call__(self, n: int):
        if not 1 <= n <= self.cap:
            raise ResourceLimitError(f"cumulant order {n} outside 1..{self.cap}")
        return self.rule(n)

    def moment(self, n: int):
        """n-th moment by summing the cumulants over NC(n)."""
        return cumulants_to_moments(single_variable(self, cap=self.cap), ("x",) * n)

    def moments(self, nmax: int) -> list:
        return [self.moment(n) for n in range(1, nmax + 1)]


def constant_cumulants(c) -> CumulantSequence:
    return CumulantSequence(lambda n: c)


def mp_moments(c, n: int):
    """n-th moment of MP_c: sum over NC(n) of c^#blocks. ``c`` may be a Poly."""
    return constant_cumulants(c).moment(n)


def bn_parameters(c, d1: int):
    """MP parameters (c1, c2) of the free difference x1 - x2 approximating d1 * W^Gamma."""
    if d1 < 1:
        raise ValueError("d1 must be positive")
    return c * d1 * Fraction(d1 + 1, 2), c * d1 * Fraction(d1 - 1, 2)


def free_difference_cumulants(c1, c2) -> CumulantSequence:
    """Cumulants of x1 - x2 with x_i free and MP_{c_i}: c1 + (-1)^n c2."""
    return CumulantSequence(lambda n: c1 + c2 if n % 2 == 0 else c1 - c2)


def aubrun_semicircle_moments(c, n: int):
    """Moments of the semicircle with kappa_1 = kappa_2 = c and no higher cumulants."""
    return CumulantSequence(lambda k: c if k <= 2 else 0).moment(n)


# -- quadrature -----------------------------------------------------------


def adaptive_simpson(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-8,
                     max_depth: int = 50, panels: int = 16) -> float:
    # a fixed initial split guards against accidental early agreement on one coarse panel
    def simpson(a, fa, b, fb):
        m = (a + b) / 2
        fm = f(m)
        return m, fm, (b - a) / 6 * (fa + 4 * fm + fb)

    def rec(a, fa, b, fb, m, fm, whole, eps, depth):
        lm, flm, left = simpson(a, fa, m, fm)
        rm, frm, right = simpson(m, fm, b, fb)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15 * eps:
            return left + right + delta / 15
        return rec(a, fa, m, fm, lm, flm, left, eps / 2, depth - 1) + rec(m, fm, b, fb, rm, frm, right, eps / 2, depth - 1)

    total = 0.0
    h = (hi - lo) / panels
    for k in range(panels):
        a, b = lo + k * h, lo + (k + 1) * h
        fa, fb = f(a), f(b)
        m, fm, whole = simpson(a, fa, b, fb)
        total += rec(a, fa, b, fb, m, fm, whole, tol / panels, max_depth)
    return total


def mp_moment_quadrature(c: float, n: int, tol: float = 1e-8) -> float:
    """integral of t^n against MP_c (continuous part plus the atom at 0).

    Substituting t = a + (b - a) sin^2(theta) removes the square-root
    endpoint singularities: dt = (b - a) sin(2 theta) d theta and
    sqrt((b - t)(t - a)) = (b - a) sin(theta) cos(theta).
    """
    p = MPParams(c)
    a, b = p.a, p.b
    w = b - a

    def integrand(theta):
        s, co = math.sin(theta), math.cos(theta)
        t = a + w * s * s
        if t <= 0:
            return 0.0
        # density * dt/dtheta = w s co / (2 pi t) * 2 w s co
        return t ** n * (w * s * co) ** 2 / (math.pi * t)

    cont = adaptive_simpson(integrand, 0.0, math.pi / 2, tol)
    return cont + (p.atom if n == 0 else 0.0)


def density_table(c: float, points: int = 200) -> str:
    """CSV ``t,density`` sampled uniformly over the MP_c support."""
    p = MPParams(c)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["t", "density"])
    for k in range(points + 1):
        t = p.a + (p.b - p.a) * k / points
        wr.writerow([repr(t), repr(mp_density(c, t))])
    return buf.getvalue()


def mp_cdf(c: float, t: float) -> float:
    """Distribution function of MP_c, atom included."""
    p = MPParams(c)
    if t < 0:
        return 0.0
    if t <= p.a:
        return p.atom
    hi = min(t, p.b)
    theta = math.asin(math.sqrt((hi - p.a) / (p.b - p.a)))
    w = p.b - p.a

    def integrand(th):
        s, co = math.sin(th), math.cos(th)
        x = p.a + w * s * s
        return 0.0 if x <= 0 else (w * s * co) ** 2 / (math.pi * x)

    return p.atom + adaptive_simpson(integrand, 0.0, theta, 1e-10)
