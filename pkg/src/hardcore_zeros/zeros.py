"""Zeros of Z on regular trees near the boundary of U_{delta-1}, and the
level-dependent activity construction that forces a zero near [0, lam_c].

Tree zeros are found by Newton's method on lam -> f_lam^k(lam) + 1 (the root
ratio of T_{delta,k} equals -1 exactly when Z vanishes), with dx/dlam carried
along the orbit.
"""

from __future__ import annotations

import cmath
import json
from dataclasses import asdict, dataclass

import mpmath
import numpy as np
from scipy.optimize import brentq

from .domain import segment_distance
from .dynamics import (boundary_distance, fixed_points, HardcoreMap, lambda_critical,
                       u_d_lambda, x_critical)
from .dynamics import boundary_points as _boundary_points
from .errors import ConstructionFailed, NoZeroFound, PreconditionViolated
from .graph import Graph, regular_tree, tree_levels
from .indpoly import ZEvaluator
from .ratio import cjson

EXACT_TREE_MAX_K = 12
EXACT_TREE_MAX_VERTICES = 2**16


@dataclass
class ZeroWitness:
    delta: int
    k: int
    lam: complex
    residual: float            # |Z| relative to the larger of its two recurrence terms
    boundary_distance: float
    validation: str            # "exact-tree" or "orbit"

    def to_dict(self):
        out = asdict(self)
        out["lam"] = cjson(self.lam)
        return out


def boundary_points(delta: int, n: int) -> list[complex]:
    """n points of the boundary of U_{delta-1}, alpha = exp(2 pi i j/n)."""
    return _boundary_points(delta - 1, n)


def outward_seed(delta: int, theta: float, distance: float) -> complex:
    """A point outside U_{delta-1} at ``distance`` from its boundary, on the ray
    from 0 through the boundary point u(e^{i theta}).

    The boundary parametrization is singular at alpha = 1 (the cusp at the
    Shearer point), so the ray is used instead of a normal.
    """
    d = delta - 1
    b = u_d_lambda(d, cmath.exp(1j * theta))
    unit = b / abs(b)
    t = brentq(lambda t: boundary_distance(d, b + t * unit) - distance, 0.0, 10 * distance + 1.0,
               xtol=1e-12)
    return b + t * unit


def _orbit_and_derivative(d, lam, k):
    x, dx = lam, 1.0 + 0j
    for _ in range(k):
        w = 1 + x
        if w == 0:
            return None, None
        wd = w**d
        x, dx = lam / wd, 1 / wd - d * lam / (wd * w) * dx
    return x, dx


def _newton(d, seed, k, radius, max_iter=80, tol=1e-14):
    lam = seed
    for _ in range(max_iter):
        x, dx = _orbit_and_derivative(d, lam, k)
        if x is None or dx == 0 or not cmath.isfinite(x) or not cmath.isfinite(dx):
            return None
        step = (x + 1) / dx
        if abs(step) > radius / 4:
            step *= radius / 4 / abs(step)
        lam -= step
        if abs(lam - seed) > radius:
            return None
        if abs(step) < tol * max(1, abs(lam)):
            x, _ = _orbit_and_derivative(d, lam, k)
            return lam if x is not None and abs(x + 1) < 1e-10 else None
    return None


def tree_residual(delta: int, k: int, lam, exact_max_k: int = EXACT_TREE_MAX_K):
    """Relative size of Z_{T_{delta,k}}(lam) against its two recurrence terms at the root.

    For k <= exact_max_k the tree is built and both terms are evaluated by
    the exact recurrence in mpmath complex arithmetic (no underflow); beyond
    that the root ratio orbit is run at 50 digits.  Returns (residual, how).
    """
    if k <= exact_max_k:
        g = regular_tree(delta, k)
        lam_mp = mpmath.mpc(complex(lam))
        ev = ZEvaluator(g, lam_mp)
        nbr = g.neighbor_masks()
        without = ev(g.full_mask & ~1)
        occupied = lam_mp * ev(g.full_mask & ~(nbr[0] | 1))
        scale = max(abs(without), abs(occupied))
        return float(abs(without + occupied) / scale), "exact-tree"
    with mpmath.workdps(50):
        lam_mp = mpmath.mpc(complex(lam))
        x = lam_mp
        for _ in range(k):
            x = lam_mp / (1 + x) ** (delta - 1)
        return float(abs(1 + x) / max(1, abs(x))), "orbit"


def _is_inside_attracting(d, lam, band=1e-6):
    rep = fixed_points(HardcoreMap(d, lam))
    return any(abs(p.multiplier) < 1 - band for p in rep.points)


def find_tree_zero(delta: int, lam_seed, k_max: int = 60, radius: float = 0.1,
                   residual_tol: float = 1e-8) -> ZeroWitness:
    """The tree zero nearest to ``lam_seed`` among T_{delta,1}, ..., T_{delta,k_max}.

    Newton is run from the seed for every depth k; converged roots farther than
    ``radius`` from the seed, or inside U_{delta-1} beyond a 1e-6 multiplier
    band, are dropped.  Survivors are validated in order of distance to the seed
    and the first with tree residual below ``residual_tol`` is returned.
    """
    if delta < 3:
        raise PreconditionViolated("delta must be >= 3")
    d = delta - 1
    seed = complex(lam_seed)
    candidates = []
    for k in range(1, k_max + 1):
        lam = _newton(d, seed, k, radius)
        if lam is not None and not _is_inside_attracting(d, lam):
            candidates.append((abs(lam - seed), k, lam))
    for _, k, lam in sorted(candidates, key=lambda c: (c[0], c[1])):
        res, how = tree_residual(delta, k, lam)
        if res < residual_tol:
            return ZeroWitness(delta, k, lam, res, boundary_distance(d, lam), how)
    raise NoZeroFound(f"no tree zero within {radius} of {seed} for k <= {k_max}")


# -- level-dependent counterexample -------------------------------------------------

@dataclass
class CounterexampleWitness:
    delta: int
    n: int                    # number of steps; the tree is T_{delta, n}
    lambdas: list             # lambda_0 .. lambda_n (leaf level first)
    orbit: list               # x_0 .. x_n
    width: float

    def to_dict(self):
        return {"delta": self.delta, "n": self.n, "width": self.width,
                "lambdas": [cjson(x) for x in self.lambdas],
                "orbit": [cjson(x) for x in self.orbit]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, obj):
        c = lambda p: complex(p["re"], p["im"])  # noqa: E731
        return cls(obj["delta"], obj["n"], [c(p) for p in obj["lambdas"]],
                   [c(p) for p in obj["orbit"]], obj["width"])


def replay_orbit(delta: int, lambdas, dps: int = 50) -> list:
    """x_0 = lambda_0, x_k = lambda_k / (1 + x_{k-1})^(delta-1), run at ``dps`` digits.

    Long orbits through the parabolic gate amplify double rounding well past
    1e-9, so the orbit of the stored (float) activities is computed at high
    precision and only then rounded.
    """
    with mpmath.workdps(dps):
        x = mpmath.mpc(complex(lambdas[0]))
        xs = [complex(x)]
        for lam in lambdas[1:]:
            x = mpmath.mpc(complex(lam)) / (1 + x) ** (delta - 1)
            xs.append(complex(x))
    return xs


def build_counterexample(delta: int, width: float, x_target: complex = -1, n_max: int = 5000,
                         grid: int = 48) -> CounterexampleWitness:
    """Activities within ``width`` of [0, lam_c] whose level orbit ends at ``x_target``.

    Two activity values drive the orbit: the leaves get lambda_0 = x_0 in the
    disk of radius 0.9 width around the parabolic point x_c, and every inner
    level gets lam_c + rho e^{i psi} with rho = 0.9 width, which opens a gate
    between the two fixed points that merge at x_c.  Over a grid of (x_0, psi)
    the orbits are advanced together; at the first depth n where some orbit
    can be finished by a root activity inside the tube, that activity is solved
    at 50 digits so that x_n = x_target.
    """
    if width <= 0:
        raise ValueError("width must be positive")
    if delta < 3:
        raise ValueError("delta must be >= 3")
    d = delta - 1
    lc = lambda_critical(delta)
    xc = x_critical(delta)
    rho = 0.9 * width
    r = np.linspace(0, rho, grid + 1)[1:]
    ang = np.linspace(0, 2 * np.pi, grid, endpoint=False)
    x0 = (xc + r[:, None] * np.exp(1j * ang[None, :])).ravel()
    gate = lc + rho * np.exp(1j * ang)
    x0, gate = (a.ravel() for a in np.meshgrid(x0, gate, indexing="ij"))
    x = x0.copy()
    with np.errstate(all="ignore"):
        for n in range(1, n_max + 1):
            need = x_target * (1 + x) ** d
            dist = segment_distance(need, 0.0, lc)
            ok = np.isfinite(dist) & (dist < rho)
            if ok.any():
                i = int(np.flatnonzero(ok)[np.argmin(dist[ok])])
                lambdas = [complex(x0[i])] + [complex(gate[i])] * (n - 1)
                lambdas.append(_solve_last(delta, lambdas, x_target))
                if all(segment_distance(l, 0.0, lc) < width for l in lambdas):
                    return CounterexampleWitness(delta, n, lambdas, replay_orbit(delta, lambdas), width)
            x = gate / (1 + x) ** d
    raise ConstructionFailed(f"width {width} too thin: no orbit reached the target within {n_max} levels")


def _solve_last(delta, lambdas, x_target, dps=50):
    with mpmath.workdps(dps):
        x = mpmath.mpc(lambdas[0])
        for lam in lambdas[1:]:
            x = mpmath.mpc(lam) / (1 + x) ** (delta - 1)
        return complex(mpmath.mpc(x_target) * (1 + x) ** (delta - 1))


def witness_in_tube(w: CounterexampleWitness) -> bool:
    lc = lambda_critical(w.delta)
    return all(segment_distance(l, 0.0, lc) < w.width for l in w.lambdas)


@dataclass
class CounterexampleTree:
    graph: Graph | None
    lam: list | None
    root_ratio: complex
    validated: bool
    residual: float
    validation: str        # "explicit-tree" or "level-recurrence"


def level_tree_z(delta: int, lambdas, dps: int = 30):
    """(Z with root free, Z with root occupied) for T_{delta,n} with depth-l activity lambda_{n-l}.

    Every subtree hanging at a given depth is identical, so the vertex
    recurrence collapses to one step per level; mpmath keeps the exponent range.
    """
    d = delta - 1
    with mpmath.workdps(dps):
        free, occ = mpmath.mpc(1), mpmath.mpc(complex(lambdas[0]))
        for lam in lambdas[1:]:
            free, occ = (free + occ) ** d, mpmath.mpc(complex(lam)) * free**d
        return free, occ


def counterexample_to_tree(w: CounterexampleWitness,
                           max_vertices: int = EXACT_TREE_MAX_VERTICES) -> CounterexampleTree:
    """T_{delta,n} with depth-l vertices carrying lambda_{n-l}; Z vanishes there.

    Trees with at most ``max_vertices`` vertices are built and checked by the
    exact vertex recurrence.  Larger ones are not materialized (``graph`` and
    ``lam`` are None) and Z is checked by the per-level recurrence instead.
    """
    root_ratio = replay_orbit(w.delta, w.lambdas)[-1]
    size = sum((w.delta - 1) ** i for i in range(w.n + 1))
    if size > max_vertices:
        free, occ = level_tree_z(w.delta, w.lambdas)
        residual = float(abs(free + occ) / max(abs(free), abs(occ)))
        return CounterexampleTree(None, None, root_ratio, residual < 1e-6, residual, "level-recurrence")
    g = regular_tree(w.delta, w.n)
    lam = [w.lambdas[w.n - lvl] for lvl in tree_levels(w.delta, w.n)]
    with mpmath.workdps(30):
        ev = ZEvaluator(g, [mpmath.mpc(x) for x in lam])
        nbr = g.neighbor_masks()
        without = ev(g.full_mask & ~1)
        occupied = mpmath.mpc(lam[0]) * ev(g.full_mask & ~(nbr[0] | 1))
        residual = float(abs(without + occupied) / max(abs(without), abs(occupied)))
    return CounterexampleTree(g, lam, root_ratio, residual < 1e-6, residual, "explicit-tree")
