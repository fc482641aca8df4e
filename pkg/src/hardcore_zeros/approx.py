"""Interpolation-method approximation of Z_G(lam) from the low-order coefficients of log Z.

The coefficients a_1..a_m of log Z_G(lam) around 0 follow from those of Z_G by
Newton's identities.  Truncating the series directly only works inside the
largest zero-free disk around 0, which for max degree 3 has radius about
0.17, far short of lam_3 = 4.  The interpolation method therefore substitutes
lam = p(w) with p(0) = 0 analytic on the unit disk and p(D) inside a region
where Z has no zeros, expands log Z(p(w)) to order m in w, and evaluates at the
preimage w* of the target lam.

Two substitutions are provided: the identity (plain Taylor series, useful
only for small lam) and a sector map onto {|arg(lam + a)| < theta}.  The
sector reaches infinity, where log Z grows like deg(Z) log(lam); that growth is
split off exactly as deg(Z) log(1 + lam/b) before truncating, so the
series only has to capture the bounded remainder.
"""

from __future__ import annotations

import math
from math import comb
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .dynamics import lambda_critical, shearer_point
from .errors import PreconditionViolated
from .graph import Graph, max_degree
from .indpoly import z_coeffs

WORK_DPS = 50


@dataclass
class TaylorLogZ:
    m: int
    coeffs: list  # a_1..a_m as Fractions

    def eval(self, lam):
        return sum(a * lam ** (k + 1) for k, a in enumerate(self.coeffs))

    def exp_coeffs(self) -> list:
        """Coefficients c_0..c_m of exp of the truncated series, exact."""
        m = self.m
        c = [Fraction(1)] + [Fraction(0)] * m
        # c' = (sum k a_k lam^{k-1}) c, coefficientwise
        for k in range(1, m + 1):
            c[k] = sum(j * self.coeffs[j - 1] * c[k - j] for j in range(1, k + 1)) / k
        return c


def log_coeffs_from(c: list, m: int) -> list:
    """a_1..a_m of log(sum c_k x^k), c_0 = 1, via k a_k = k c_k - sum_{j<k} j a_j c_{k-j}."""
    if not c or c[0] != 1:
        raise ValueError("constant coefficient must be 1")
    ck = lambda k: Fraction(c[k]) if k < len(c) else Fraction(0)  # noqa: E731
    a = []
    for k in range(1, m + 1):
        s = k * ck(k) - sum(j * a[j - 1] * ck(k - j) for j in range(1, k))
        a.append(s / k)
    return a


def log_z_taylor(g: Graph, m: int) -> TaylorLogZ:
    """Order-m Taylor polynomial of log Z_G around lam = 0, in exact rationals."""
    if m < 0:
        raise ValueError("m must be non-negative")
    return TaylorLogZ(m, log_coeffs_from(z_coeffs(g), m))


# -- substitutions lam = p(w) ----------------------------------------------------

@dataclass(frozen=True)
class IdentityMap:
    """lam = target * w, evaluated at w = 1: the plain Taylor series."""

    def series(self, target, m):
        return [mpmath.mpf(0), mpmath.mpf(target)] + [mpmath.mpf(0)] * (m - 1), mpmath.mpf(1)


@dataclass(frozen=True)
class SectorMap:
    """lam = -a + a ((1+w)/(1-w))^(2 theta/pi): the disk onto {|arg(lam + a)| < theta}.

    The apex -a sits on the negative axis.  Z has no zeros in the disk of the
    Shearer radius, so the apex is put there; theta is limited by the complex
    zeros, which for small graphs of max degree 3 stay at |arg| > 2.03.
    """
    apex: float
    theta: float

    def series(self, target, m):
        a = mpmath.mpf(self.apex)
        s = 2 * mpmath.mpf(self.theta) / mpmath.pi
        # log((1+w)/(1-w)) = 2 (w + w^3/3 + ...)
        ell = [mpmath.mpf(0)] + [mpmath.mpf(2) / k if k % 2 else mpmath.mpf(0) for k in range(1, m + 1)]
        e = _series_exp([s * x for x in ell], m)
        p = [a * x for x in e]
        p[0] = mpmath.mpf(0)
        q = ((mpmath.mpf(target) + a) / a) ** (1 / s)
        return p, (q - 1) / (q + 1)


SECTOR_THETA = 2.0
DEGREE_POLE_FACTOR = 4


def default_map(delta: int = 3) -> SectorMap:
    """Sector map for max degree ``delta``: apex at the Shearer radius."""
    return SectorMap(apex=shearer_point(delta), theta=SECTOR_THETA)


def _series_exp(f, m):
    """Coefficients of exp(f(w)) to order m, f(0) = 0."""
    out = [mpmath.mpf(1)] + [mpmath.mpf(0)] * m
    for k in range(1, m + 1):
        out[k] = sum(j * f[j] * out[k - j] for j in range(1, k + 1)) / k
    return out


def _compose(a, p, m):
    """Coefficients of sum_k a_k p(w)^k to order m, p(0) = 0."""
    out = [mpmath.mpf(0)] * (m + 1)
    pk = [mpmath.mpf(1)] + [mpmath.mpf(0)] * m
    for k in range(1, m + 1):
        pk = [mpmath.fsum(pk[i] * p[j - i] for i in range(j + 1)) for j in range(m + 1)]
        ak = mpmath.mpf(a[k - 1].numerator) / a[k - 1].denominator
        for j in range(k, m + 1):
            out[j] += ak * pk[j]
    return out


@dataclass
class Approximation:
    value: float
    error_estimate: float   # |last term|, a heuristic rather than a bound
    m: int
    w_star: float


def _divide_power(c, b: Fraction, alpha: int, m: int) -> list:
    """Coefficients to order m of (sum c_k x^k) / (1 + x/b)^alpha, exact."""
    inv = [Fraction(comb(alpha + k - 1, k)) * (-1 / b) ** k for k in range(m + 1)]
    return [sum(Fraction(c[i]) * inv[k - i] for i in range(min(k, len(c) - 1) + 1))
            for k in range(m + 1)]


def approx_z(g: Graph, lam: float, m: int, delta: int | None = None, eps: float | None = None,
             substitution=None, degree_pole: float | None = None) -> Approximation:
    """exp of the order-m expansion of log Z_G(p(w)) at w = p^{-1}(lam).

    With ``delta`` given, lam must lie in [0, (1 - eps) lam_delta] and the
    graph must have max degree <= delta.  ``substitution`` defaults to the
    sector map for ``delta`` (3 when omitted).  ``degree_pole`` is b in the
    split-off term deg(Z) log(1 + lam/b); it defaults to 4 times the sector
    apex for unbounded substitutions and is skipped for the identity.
    """
    if lam < 0:
        raise PreconditionViolated("lam must be non-negative")
    if delta is not None:
        if max_degree(g) > delta:
            raise PreconditionViolated(f"max degree {max_degree(g)} exceeds {delta}")
        bound = (1 - (eps or 0.0)) * lambda_critical(delta)
        if lam > bound:
            raise PreconditionViolated(f"lam = {lam} outside [0, {bound}]")
    if lam == 0:
        return Approximation(1.0, 0.0, m, 0.0)
    if m == 0:
        return Approximation(1.0, math.inf, m, math.nan)
    sub = substitution if substitution is not None else default_map(delta or 3)
    if degree_pole is None and isinstance(sub, SectorMap):
        degree_pole = DEGREE_POLE_FACTOR * sub.apex
    c = z_coeffs(g)
    alpha = len(c) - 1
    with mpmath.workdps(WORK_DPS):
        split = mpmath.mpf(0)
        if degree_pole:
            b = Fraction(degree_pole).limit_denominator(10**12)
            c = _divide_power(c, b, alpha, m)
            bm = mpmath.mpf(b.numerator) / b.denominator
            split = alpha * mpmath.log1p(lam / bm)
        a = log_coeffs_from(c, m)
        p, w = sub.series(lam, m)
        coef = _compose(a, p, m)
        terms = [coef[j] * w**j for j in range(m + 1)]
        total = mpmath.fsum(terms) + split
        try:
            value = float(mpmath.exp(total))
        except OverflowError:
            value = math.inf
        return Approximation(value, float(abs(terms[-1])), m, float(w))
