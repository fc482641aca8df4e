"""The tree-recursion maps x -> lam / (1 + x)**d and their parameter space."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .indpoly import poly_eval, roots_univariate

INFINITY = complex(math.inf, 0.0)
POLE_TOL = 1e-14
NEUTRAL_BAND = 1e-9
ATTRACTING_MARGIN = 1e-12


def is_infinite(x) -> bool:
    return cmath.isinf(complex(x))


@dataclass(frozen=True)
class HardcoreMap:
    d: int
    lam: complex

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("degree parameter d must be >= 1")

    def __call__(self, x):
        if is_infinite(x):
            return 0j
        if x == -1:
            return INFINITY
        return self.lam / (1 + x) ** self.d

    def derivative(self, x):
        return -self.d * self.lam / (1 + x) ** (self.d + 1)


def apply(m: HardcoreMap, x):
    return m(x)


# -- constants --------------------------------------------------------------

def _check_delta(delta):
    if delta < 3:
        raise ValueError("critical constants need delta >= 3")


def lambda_critical(delta: int, exact: bool = False):
    """(delta-1)^(delta-1) / (delta-2)^delta."""
    _check_delta(delta)
    val = Fraction((delta - 1) ** (delta - 1), (delta - 2) ** delta)
    return val if exact else float(val)


def x_critical(delta: int, exact: bool = False):
    """The parabolic fixed point 1/(delta-2) of f at lambda_critical."""
    _check_delta(delta)
    val = Fraction(1, delta - 2)
    return val if exact else float(val)


def shearer_point(delta: int, exact: bool = False):
    """(delta-1)^(delta-1) / delta^delta."""
    _check_delta(delta)
    val = Fraction((delta - 1) ** (delta - 1), delta**delta)
    return val if exact else float(val)


# -- fixed points -----------------------------------------------------------

@dataclass
class FixedPoint:
    x: complex
    multiplier: complex
    kind: str  # attracting | neutral | repelling


@dataclass
class FixedPointReport:
    d: int
    lam: complex
    points: list[FixedPoint] = field(default_factory=list)

    def attracting(self):
        return [p for p in self.points if p.kind == "attracting"]

    def nearest_to_unit_modulus(self) -> FixedPoint:
        return min(self.points, key=lambda p: abs(abs(p.multiplier) - 1))


def multiplier(d: int, x) -> complex:
    return -d * x / (1 + x)


def classify(mult, band: float = NEUTRAL_BAND) -> str:
    r = abs(mult)
    if abs(r - 1) <= band:
        return "neutral"
    return "attracting" if r < 1 else "repelling"


def _fixed_point_poly(d, lam):
    # x (1+x)^d - lam, ascending coefficients
    return [-lam] + [comb(d, j) for j in range(d + 1)]


def _merge_clusters(roots, poly, radius=1e-6):
    """Replace clusters of nearly equal roots by a root of the matching derivative."""
    out, used = [], [False] * len(roots)
    for i, r in enumerate(roots):
        if used[i]:
            continue
        group = [j for j in range(len(roots)) if not used[j] and abs(roots[j] - r) < radius * max(1, abs(r))]
        for j in group:
            used[j] = True
        if len(group) == 1:
            out.append(r)
            continue
        deriv = list(poly)
        for _ in range(len(group) - 1):
            deriv = [i * deriv[i] for i in range(1, len(deriv))]
        dd = [i * deriv[i] for i in range(1, len(deriv))]
        c = sum(roots[j] for j in group) / len(group)
        for _ in range(50):
            den = poly_eval(dd, c)
            if den == 0:
                break
            step = poly_eval(deriv, c) / den
            c -= step
            if abs(step) < 1e-17:
                break
        out.extend([c] * len(group))
    return out


def fixed_points(m: HardcoreMap) -> FixedPointReport:
    """All d+1 finite fixed points (with multiplicity) and their multipliers."""
    lam = complex(m.lam)
    report = FixedPointReport(m.d, lam)
    if lam == 0:
        report.points.append(FixedPoint(0j, 0j, "attracting"))
        return report
    poly = _fixed_point_poly(m.d, lam)
    roots = _merge_clusters(roots_univariate(poly, tol=1e-10), poly)
    for x in roots:
        mu = multiplier(m.d, x)
        report.points.append(FixedPoint(x, mu, classify(mu)))
    return report


def u_d_lambda(d: int, alpha):
    """Parameter whose fixed point -alpha/(d+alpha) has multiplier alpha."""
    if alpha == -d:
        raise ValueError("alpha = -d is a pole of the parametrization")
    return -alpha * d**d / (d + alpha) ** (d + 1)


def in_attracting_region(d: int, lam) -> bool:
    rep = fixed_points(HardcoreMap(d, lam))
    return any(abs(p.multiplier) < 1 - ATTRACTING_MARGIN for p in rep.points)


def boundary_points(d: int, n: int) -> list[complex]:
    """Points of the boundary of U_d at alpha = exp(2 pi i j / n)."""
    if n < 1:
        raise ValueError("need at least one point")
    return [u_d_lambda(d, cmath.exp(2j * math.pi * j / n)) for j in range(n)]


def boundary_distance(d: int, lam, samples: int = 4096) -> float:
    """Euclidean distance from ``lam`` to the curve alpha -> u_d_lambda(d, alpha), |alpha| = 1."""
    theta = np.linspace(0, 2 * np.pi, samples, endpoint=False)
    alpha = np.exp(1j * theta)
    curve = -alpha * d**d / (d + alpha) ** (d + 1)
    j = int(np.argmin(np.abs(curve - lam)))
    h = 2 * np.pi / samples

    def dist(t):
        return abs(u_d_lambda(d, cmath.exp(1j * t)) - lam)

    def slope(t):
        # half the t-derivative of dist^2, using du/dalpha = -d^(d+1) (1 - alpha) / (d + alpha)^(d+2)
        al = cmath.exp(1j * t)
        du = -(d ** (d + 1)) * (1 - al) / (d + al) ** (d + 2) * 1j * al
        return ((u_d_lambda(d, al) - lam) * du.conjugate()).real

    lo, hi = theta[j] - h, theta[j] + h
    if slope(lo) < 0 < slope(hi):
        t = brentq(slope, lo, hi, xtol=1e-15)
    else:
        t = minimize_scalar(dist, bounds=(lo, hi), method="bounded", options={"xatol": 1e-13}).x
    return float(min(dist(t), dist(theta[j])))


# -- orbits -----------------------------------------------------------------

@dataclass
class Orbit:
    points: list
    pole_step: int | None = None

    def __getitem__(self, i):
        return self.points[i]

    def __len__(self):
        return len(self.points)

    @property
    def final(self):
        return self.points[-1]


def orbit(m: HardcoreMap, x0, steps: int) -> Orbit:
    """Iterates x0, f(x0), ..., stopping when an iterate is within POLE_TOL of -1."""
    pts = [x0]
    x = x0
    for j in range(steps):
        if not is_infinite(x) and abs(x + 1) < POLE_TOL:
            return Orbit(pts, pole_step=j)
        x = m(x)
        pts.append(x)
    return Orbit(pts)
