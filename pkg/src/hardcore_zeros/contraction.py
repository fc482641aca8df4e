"""Coordinates in which every f_{d,lam}, d < delta, lam in [0, lam_c), contracts.

With z = phi(x) = log(1 + y log(1 + x)) the conjugate g = phi o f o phi^{-1}
has the closed-form derivative

    g'(z0) = (1 + y log(1+x0)) / (1 + y log(1+x1)) * (-d x1 / (1+x1))

with x0 = phi^{-1}(z0), x1 = f(x0).  Since 1 + y log(1+x0) = e^{z0} and
log(1+x0) = (e^{z0} - 1)/y, everything below is written in terms of z0 directly,
which avoids overflowing 1 + x0 for large z0.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar

from .dynamics import lambda_critical, x_critical
from .errors import BranchViolation, CertificationFailed

TAIL_BOUND = 0.5


def y_delta(delta: int) -> float:
    """The unique y > 0 making g'' vanish at the parabolic fixed point."""
    xd = x_critical(delta)
    return 1.0 / (2 * xd - math.log1p(xd))


@dataclass(frozen=True)
class CoordinateChange:
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError("y must be positive")

    @classmethod
    def for_delta(cls, delta: int) -> "CoordinateChange":
        return cls(y_delta(delta))

    def phi(self, x):
        """Principal branch of log(1 + y log(1 + x))."""
        w = 1 + complex(x)
        if w.imag == 0 and w.real <= 0:
            raise BranchViolation(f"1 + x = {w} lies on the cut of the inner logarithm")
        u = 1 + self.y * cmath.log(w)
        if u.imag == 0 and u.real <= 0:
            raise BranchViolation(f"1 + y log(1 + x) = {u} lies on the cut of the outer logarithm")
        return cmath.log(u)

    def phi_inv(self, z):
        z = complex(z)
        if abs(z.imag) >= math.pi:
            raise BranchViolation(f"|Im z| >= pi at z = {z}")
        inner = (cmath.exp(z) - 1) / self.y
        if abs(inner.imag) >= math.pi:
            raise BranchViolation(f"|Im log(1+x)| >= pi at z = {z}")
        return cmath.exp(inner) - 1

    def log1p_inv(self, z):
        """log(1 + phi^{-1}(z)) without forming 1 + x."""
        return (cmath.exp(complex(z)) - 1) / self.y

    def phi_prime(self, x):
        x = complex(x)
        return self.y / ((1 + x) * (1 + self.y * cmath.log(1 + x)))


def _cc(delta, y):
    return CoordinateChange(y_delta(delta) if y is None else y)


def _x1(cc, d, lam, z):
    return lam * cmath.exp(-d * cc.log1p_inv(z))


def g_eval(delta: int, d: int, lam, z, y: float | None = None):
    """g_{d,lam}(z) = phi(f_{d,lam}(phi^{-1}(z)))."""
    cc = _cc(delta, y)
    if abs(complex(z).imag) >= math.pi:
        raise BranchViolation(f"|Im z| >= pi at z = {z}")
    return cc.phi(_x1(cc, d, lam, z))


def _h(d, y, x1):
    # -d x1 / ((1 + x1)(1 + y log(1 + x1)))
    return -d * x1 / ((1 + x1) * (1 + y * cmath.log(1 + x1)))


def _h_prime(d, y, x1):
    u = 1 + y * cmath.log(1 + x1)
    return d * (x1 * y - u) / ((1 + x1) ** 2 * u**2)


def g_prime(delta: int, d: int, lam, z0, y: float | None = None):
    cc = _cc(delta, y)
    x1 = _x1(cc, d, lam, z0)
    return cmath.exp(complex(z0)) * _h(d, cc.y, x1)


def g_second_derivative(delta: int, d: int, lam, z0, y: float | None = None):
    """d^2 g / dz^2 at z0."""
    cc = _cc(delta, y)
    x1 = _x1(cc, d, lam, z0)
    ez = cmath.exp(complex(z0))
    return ez * _h(d, cc.y, x1) + ez * _h_prime(d, cc.y, x1) * (-d * x1 * ez / cc.y)


def dgprime_dx0(delta: int, d: int, lam: float, z0: float, y: float | None = None) -> float:
    """Partial derivative of g' with respect to x0, in the two-term closed form.

    Has the sign of g'' because dx0/dz0 > 0 on the real axis.
    """
    cc = _cc(delta, y)
    yy = cc.y
    lx0 = cc.log1p_inv(z0).real
    x0 = math.expm1(lx0)
    x1 = lam * math.exp(-d * lx0)
    u1 = 1 + yy * math.log1p(x1)
    first = (yy / (1 + x0)) / u1 * (-d * x1 / (1 + x1))
    second = (1 + yy * lx0) * (-d * d * x1 / (1 + x0)) * (x1 * yy - u1) / ((1 + x1) ** 2 * u1**2)
    return first + second


g_second_derivative_sign = dgprime_dx0


def dg_dlambda(delta: int, d: int, lam, z, y: float | None = None):
    """Partial derivative of g_{d,lam}(z) in lam."""
    cc = _cc(delta, y)
    x1 = _x1(cc, d, lam, z)
    return cc.phi_prime(x1) * cmath.exp(-d * cc.log1p_inv(z))


def c_delta(delta: int) -> float:
    lc = lambda_critical(delta)
    return lc - (1 / y_delta(delta) + math.log1p(lc))


def z_critical(delta: int) -> float:
    return CoordinateChange.for_delta(delta).phi(x_critical(delta)).real


# -- vectorized real-axis evaluation ----------------------------------------

def _real_derivs(d, lam, z, y):
    """|g'|, |dg'/dz| and |dg'/dlam| on broadcast real arrays."""
    ez = np.exp(z)
    decay = np.exp(-d * (ez - 1) / y)
    x1 = lam * decay
    u1 = 1 + y * np.log1p(x1)
    h = -d * x1 / ((1 + x1) * u1)
    hp = d * (x1 * y - u1) / ((1 + x1) ** 2 * u1**2)
    gp = ez * h
    gpp = ez * h + ez * hp * (-d * x1 * ez / y)
    gpl = ez * hp * decay
    return np.abs(gp), np.abs(gpp), np.abs(gpl)


def tail_start(delta: int, lam_max: float, y: float | None = None) -> float:
    """A z beyond which |g'| < TAIL_BOUND for all d < delta and 0 <= lam <= lam_max.

    Uses |g'(z)| <= d lam exp(z - d (e^z - 1)/y), which decreases for z > log(y/d).
    Starts at 1 and doubles.
    """
    y = y_delta(delta) if y is None else y
    z = 1.0
    while True:
        ok = True
        for d in range(1, delta):
            if z <= math.log(y / d):
                ok = False
                break
            if d * lam_max * math.exp(z - d * math.expm1(z) / y) >= TAIL_BOUND:
                ok = False
                break
        if ok:
            return z
        z *= 2


@dataclass
class GridReport:
    delta: int
    eps: float
    resolution: int
    z_max: float
    lam_max: float
    max_abs_gprime: float
    argmax: tuple           # (d, lam, z) of the largest margin-adjusted cell
    margin: float
    margin_adjusted_max: float
    certified_delta: float
    certified: bool
    tail_checked: bool

    def to_dict(self):
        out = asdict(self)
        out["argmax"] = {"d": self.argmax[0], "lam": self.argmax[1], "z": self.argmax[2]}
        return out


def _scan_degree(d, lam_grid, z_grid, y, chunk):
    """Per-cell upper bound on |g'| for one d; returns (bound, node max, argmax, margin)."""
    hz = z_grid[1] - z_grid[0]
    hl = lam_grid[1] - lam_grid[0] if len(lam_grid) > 1 else 0.0
    best = (-np.inf, -np.inf, None, 0.0)
    node_max = -np.inf
    zz = z_grid[None, :]
    for start in range(0, len(lam_grid) - 1, chunk):
        rows = lam_grid[start:start + chunk + 1, None]
        a, gz, gl = _real_derivs(d, rows, zz, y)
        node_max = max(node_max, float(a.max()))

        def corner_max(m):
            return np.maximum(np.maximum(m[:-1, :-1], m[1:, :-1]), np.maximum(m[:-1, 1:], m[1:, 1:]))

        slope = 2.0 * (corner_max(gz) * hz / 2 + corner_max(gl) * hl / 2)
        bound = corner_max(a) + slope
        i, j = np.unravel_index(int(np.argmax(bound)), bound.shape)
        if bound[i, j] > best[0]:
            best = (float(bound[i, j]), node_max, (d, float(lam_grid[start + i]), float(z_grid[j])),
                    float(slope[i, j]))
    return best[0], node_max, best[2], best[3]


def certify_contraction(delta: int, eps: float, resolution: int = 2000, jobs: int = 1,
                        chunk: int = 256, raise_on_failure: bool = True) -> GridReport:
    """Grid certificate that |g'_{d,lam}(z)| <= 1 - delta_cert on the whole quadrant.

    Scans d = 0..delta-1, lam in [0, (1-eps) lam_c], z in [0, z_max] on a
    (resolution+1)^2 grid.  Each cell's bound is the largest corner value of
    |g'| plus twice the first-order change allowed by the largest corner
    values of |dg'/dz| and |dg'/dlam| over half a cell.  Beyond z_max the
    analytic tail bound of ``tail_start`` keeps |g'| < 1/2.  This is numerical
    evidence, not interval arithmetic.
    """
    if delta < 3:
        raise ValueError("delta must be >= 3")
    if not 0 <= eps < 1:
        raise ValueError("eps must lie in [0, 1)")
    y = y_delta(delta)
    lam_max = (1 - eps) * lambda_critical(delta)
    z_max = tail_start(delta, lam_max, y)
    lam_grid = np.linspace(0.0, lam_max, resolution + 1)
    z_grid = np.linspace(0.0, z_max, resolution + 1)

    # numerical spot check of the tail bound
    tail_z = z_max * np.geomspace(1, 8, 64)
    tail_ok = all(
        float(_real_derivs(d, lam_grid[:: max(1, resolution // 64), None], tail_z[None, :], y)[0].max())
        < TAIL_BOUND for d in range(1, delta))

    degrees = list(range(1, delta))  # d = 0 gives g' = 0
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            results = list(ex.map(lambda d: _scan_degree(d, lam_grid, z_grid, y, chunk), degrees))
    else:
        results = [_scan_degree(d, lam_grid, z_grid, y, chunk) for d in degrees]
    # deterministic tie-break: lexicographic on (d, lam, z) among equal bounds
    top = max(r[0] for r in results)
    bound, _, arg, margin = min((r for r in results if r[0] == top), key=lambda r: r[2])
    node_max = max(r[1] for r in results)
    adjusted = max(bound, TAIL_BOUND)
    report = GridReport(delta, eps, resolution, z_max, lam_max, node_max, arg, margin,
                        adjusted, 1 - adjusted, bool(adjusted < 1 and tail_ok), tail_ok)
    if raise_on_failure and not report.certified:
        raise CertificationFailed(
            f"margin-adjusted max |g'| = {adjusted:.6f} >= 1 at (d, lam, z) = {arg}", report)
    return report


# -- the delta in {3, 4} estimate -------------------------------------------

def alpha_delta(delta: int) -> float:
    """Lower bound x1 >= alpha * x_c for stationary-in-lam points."""
    xd = x_critical(delta)
    return 2 + math.log((1 + 2 * xd) / (1 + xd)) / xd


def _gprime_stationary(delta, y, lx0, x1):
    # g' once x1 y = 1 + y log(1 + x1) holds
    return -(delta - 1) * (1 + y * lx0) / (y * (1 + x1))


@dataclass
class Case34Report:
    delta: int
    alpha: float
    minimum: float              # min over the relaxed set x1 >= alpha x_c, 1+x0 <= alpha^(-1/d)(1+x_c)
    argmin: tuple               # (x0, x1) attaining ``minimum``
    stationary_x1: float        # the unique x1 >= x_c with x1 y = 1 + y log(1 + x1)
    stationary_minimum: float   # min of g' over actual stationary points with 0 < lam <= lam_c
    closed_form: float


def case34_bound_check(delta: int, samples: int = 400, seed: int = 0) -> Case34Report:
    """Numerical minimization behind the bound g' >= -0.92 for delta in {3, 4}.

    Stationary points in lam satisfy x1 y = 1 + y log(1 + x1), whence
    g' = -(delta-1)(1 + y log(1+x0)) / (y (1+x1)), decreasing in x0 and
    increasing in x1.  The constraint lam <= lam_c together with the derived
    x1 >= alpha x_c bounds 1 + x0 <= alpha^{-1/(delta-1)} (1 + x_c).
    ``minimum`` minimizes g' over that relaxed box (multistart L-BFGS-B);
    ``stationary_minimum`` minimizes over the exact stationary curve
    parametrized by lam, which can only be larger.
    """
    if delta not in (3, 4):
        raise ValueError("only delta in {3, 4} is covered")
    d = delta - 1
    y = y_delta(delta)
    xd = x_critical(delta)
    lc = lambda_critical(delta)
    alpha = alpha_delta(delta)
    x1_lo = alpha * xd
    lx0_hi = math.log(alpha ** (-1 / d) * (1 + xd))

    rng = np.random.default_rng(seed)
    best = (math.inf, None)
    box = [(0.0, lx0_hi), (x1_lo, 20 * x1_lo)]
    starts = np.column_stack([rng.uniform(*box[0], samples), rng.uniform(*box[1], samples)])
    for s in starts[: max(1, samples // 20)]:
        res = minimize(lambda p: _gprime_stationary(delta, y, p[0], p[1]), s,
                       method="L-BFGS-B", bounds=box)
        if res.fun < best[0]:
            best = (float(res.fun), (math.expm1(res.x[0]), float(res.x[1])))
    vals = _gprime_stationary(delta, y, starts[:, 0], starts[:, 1])
    if vals.min() < best[0]:
        i = int(vals.argmin())
        best = (float(vals[i]), (math.expm1(starts[i, 0]), float(starts[i, 1])))

    x1s = brentq(lambda t: t * y - (1 + y * math.log1p(t)), xd, 100 * (xd + 1))
    lam_min = x1s  # x0 >= 0 forces lam = x1 (1+x0)^d >= x1
    stationary = math.inf
    if lam_min <= lc:
        lams = np.linspace(lam_min, lc, samples)
        lx0 = np.log(lams / x1s) / d
        stationary = float(_gprime_stationary(delta, y, lx0, x1s).min())

    closed = (-2 * (delta - 1) / (delta - 2) + math.log(alpha)) / ((delta - 2 + alpha) / (delta - 2))
    return Case34Report(delta, alpha, best[0], best[1], x1s, stationary, closed)


def degree_monotonicity_samples(delta: int, n_lam: int = 40, seed: int = 0):
    """Real stationary points (dg'/dx0 = 0) of g_{d,lam} with the two g' values to compare.

    Yields tuples (d, lam, z0, g'_{d,lam}(z0), min_z g'_{delta-1,lam}(z)).  The
    comparison is between stationary values: differentiating g' in d while
    following the stationary point, the z-derivative term drops out, so the
    stationary value decreases with d.  At a common z0 the inequality can fail.
    """
    rng = np.random.default_rng(seed)
    lc = lambda_critical(delta)
    y = y_delta(delta)
    z_hi = tail_start(delta, lc, y)
    zs = np.linspace(0, z_hi, 400)
    out = []
    for lam in rng.uniform(0.02 * lc, lc, n_lam):
        top = _stationary_min(delta, delta - 1, lam, zs)
        for d in range(1, delta):
            vals = [dgprime_dx0(delta, d, lam, z) for z in zs]
            for a, b, va, vb in zip(zs[:-1], zs[1:], vals[:-1], vals[1:]):
                if va == 0 or va * vb < 0:
                    z0 = brentq(lambda z: dgprime_dx0(delta, d, lam, z), a, b) if va != 0 else a
                    out.append((d, float(lam), float(z0), g_prime(delta, d, lam, z0).real, top))
    return out


def _stationary_min(delta, d, lam, zs):
    vals = np.array([g_prime(delta, d, lam, z).real for z in zs])
    j = int(vals.argmin())
    lo, hi = zs[max(j - 1, 0)], zs[min(j + 1, len(zs) - 1)]
    res = minimize_scalar(lambda z: g_prime(delta, d, lam, z).real, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    return float(min(res.fun, vals[j]))
