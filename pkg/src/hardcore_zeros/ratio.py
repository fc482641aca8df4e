"""Occupation ratios R_{G,v} = lam_v Z(G \\ N[v]) / Z(G - v) and their elimination recursion.

The recursion expresses R_{G,v0} through ratios of the neighbors v_1 < ... < v_d
of v0 in the successively smaller graphs G_0 = G - v0, G_i = G_{i-1} - v_i:

    R_{G,v0} = lam_{v0} / prod_i (1 + R_{G_{i-1}, v_i}).

Ratios only depend on the connected component containing the pivot, which keeps
the memo small (linear on trees).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .dynamics import HardcoreMap, POLE_TOL
from .errors import PoleHit, Undecidable, ZeroDenominator
from .graph import Graph, components, vertices_of
from .indpoly import ZEvaluator, as_lambda

MINUS_ONE_TOL = 1e-12
ZERO_REL_TOL = 1e-13


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


def _vanishes(z, scale) -> bool:
    if _is_exact(z):
        return z == 0
    return abs(z) <= ZERO_REL_TOL * scale


def ratio_direct(g: Graph, v0: int, lam):
    """lam_v0 * Z(G \\ N[v0]) / Z(G - v0) from two exact evaluations."""
    g._check_vertex(v0)
    lam = as_lambda(g, lam)
    z = ZEvaluator(g, lam)
    full = g.full_mask
    nbr = g.neighbor_masks()
    den = z(full & ~(1 << v0))
    if _vanishes(den, _abs_scale(g, lam, full & ~(1 << v0))):
        raise ZeroDenominator("Z(G - v0) vanishes", subgraph=vertices_of(full & ~(1 << v0)))
    return lam[v0] * z(full & ~(nbr[v0] | (1 << v0))) / den


def _abs_scale(g, lam, mask):
    if all(_is_exact(x) for x in lam):
        return 1
    return abs(ZEvaluator(g, [abs(complex(x)) for x in lam])(mask))


@dataclass
class RatioStep:
    subgraph: tuple[int, ...]   # original vertex ids of the component holding the pivot
    pivot: int
    ratio: complex
    factors: tuple               # 1 + R_{G_{i-1}, v_i}, in neighbor order
    neighbors: tuple[int, ...]

    def to_dict(self):
        return {
            "subgraph": list(self.subgraph),
            "pivot": self.pivot,
            "neighbors": list(self.neighbors),
            "ratio": cjson(self.ratio),
            "factors": [cjson(f) for f in self.factors],
        }


@dataclass
class RatioTrace:
    steps: list[RatioStep] = field(default_factory=list)

    def replay_errors(self, lam) -> list[float]:
        """|stored R - lam_pivot / prod(stored factors)| for every step."""
        errs = []
        for s in self.steps:
            prod = 1
            for f in s.factors:
                prod = prod * f
            errs.append(abs(complex(s.ratio - lam[s.pivot] / prod)))
        return errs

    def to_json(self) -> str:
        return json.dumps({"steps": [s.to_dict() for s in self.steps]}, sort_keys=True)


def cjson(x):
    x = complex(x)
    return {"re": x.real, "im": x.imag}


class RatioEngine:
    """Memoized elimination recursion for one graph and activity vector.

    ``on_step`` is called with every newly computed ``RatioStep`` and may raise
    to abort (the domain certifiers use this to check each ratio as it appears).
    """

    def __init__(self, g: Graph, lam, on_step=None):
        self.g = g
        self.lam = as_lambda(g, lam)
        self.nbr = g.neighbor_masks()
        self.memo: dict[tuple[int, int], object] = {}
        self.trace = RatioTrace()
        self.on_step = on_step

    def component_of(self, mask: int, v: int) -> int:
        comp = frontier = 1 << v
        while frontier:
            low = frontier & -frontier
            frontier ^= low
            new = self.nbr[low.bit_length() - 1] & mask & ~comp
            comp |= new
            frontier |= new
        return comp

    def ratio(self, mask: int, v: int):
        comp = self.component_of(mask, v)
        key = (comp, v)
        if key in self.memo:
            return self.memo[key]
        neighbors = vertices_of(self.nbr[v] & comp)
        rest = comp & ~(1 << v)
        factors = []
        for u in neighbors:
            r = self.ratio(rest, u)
            f = 1 + r
            if (f == 0) if _is_exact(f) else abs(f) <= MINUS_ONE_TOL:
                raise ZeroDenominator(
                    f"Z vanishes on induced subgraph {vertices_of(self.component_of(rest, u))}",
                    subgraph=vertices_of(self.component_of(rest, u)))
            factors.append(f)
            rest &= ~(1 << u)
        prod = 1
        for f in factors:
            prod = prod * f
        r = self.lam[v] / prod
        step = RatioStep(tuple(vertices_of(comp)), v, r, tuple(factors), tuple(neighbors))
        self.trace.steps.append(step)
        if self.on_step is not None:
            self.on_step(step)
        self.memo[key] = r
        return r


def ratio_via_elimination(g: Graph, v0: int, lam):
    """R_{G,v0} by the elimination recursion, with the full step trace."""
    g._check_vertex(v0)
    eng = RatioEngine(g, lam)
    r = eng.ratio(g.full_mask, v0)
    return r, eng.trace


def nonvanishing_via_ratio(g: Graph, lam) -> bool:
    """Decide Z_G(lam) != 0 through R_{C,v} != -1 on every component C.

    Floating-point ratios within MINUS_ONE_TOL of -1 are re-decided exactly when
    all activities are real; complex ones count as zeros.  If a denominator in
    the recursion vanishes, falls back to direct evaluation, raising
    ``Undecidable`` if that is also inconclusive.
    """
    lam = as_lambda(g, lam)
    for comp in components(g):
        v0 = vertices_of(comp)[0]
        eng = RatioEngine(g, lam)
        try:
            r = eng.ratio(comp, v0)
        except ZeroDenominator:
            if not _component_nonzero_direct(g, lam, comp):
                return False
            continue
        if _is_exact(r):
            if r == -1:
                return False
        elif abs(r + 1) <= MINUS_ONE_TOL:
            if all(complex(x).imag == 0 for x in lam):
                exact = [Fraction(complex(x).real) for x in lam]
                if ZEvaluator(g, exact)(comp) == 0:
                    return False
            else:
                return False
    return True


def _component_nonzero_direct(g, lam, comp) -> bool:
    if all(_is_exact(x) or complex(x).imag == 0 for x in lam):
        exact = [x if _is_exact(x) else Fraction(complex(x).real) for x in lam]
        return ZEvaluator(g, exact)(comp) != 0
    z = ZEvaluator(g, lam)(comp)
    scale = _abs_scale(g, lam, comp)
    if abs(z) > 1e-8 * scale:
        return True
    raise Undecidable("ratio recursion hit a vanishing denominator and |Z| is within tolerance of 0")


def tree_ratio_orbit(delta: int, k: int, lam):
    """Root ratio of T_{delta,k}: the k-th iterate of x -> lam/(1+x)^(delta-1) from lam."""
    if delta < 2:
        raise ValueError("delta must be >= 2")
    f = HardcoreMap(delta - 1, lam)
    x = lam
    for step in range(k):
        if x == -1 or abs(x + 1) < POLE_TOL:
            raise PoleHit(step)
        x = f(x)
    return x
