"""Invariant tube D(eps1) around [0, phi(lam_c)] and inductive non-vanishing certificates.

``certify_graph`` runs the elimination recursion of ``ratio.RatioEngine`` and
checks that phi(R) stays inside D(eps1) for every ratio whose pivot still has a
neighbor outside its subgraph.  Every recursive call has that property: the
pivot's parent in the recursion was removed just before.  The root ratio is
handled separately: the partial product over all but one neighbor lands in
phi^{-1}(D), and two points of phi^{-1}(D) cannot sum to -1 once its real part
stays above -1/2.
"""

from __future__ import annotations

import cmath
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .contraction import CoordinateChange, certify_contraction, y_delta
from .dynamics import lambda_critical
from .errors import (BranchViolation, ConditionViolated, InvarianceViolated, OutOfDomain,
                     PreconditionViolated, SearchFailed)
from .graph import Graph, components, max_degree, serialize_edge_list, vertices_of
from .indpoly import ZEvaluator, as_lambda
from .ratio import RatioEngine, cjson

REAL_PART_FLOOR = -0.4
EPS1_START = 0.05
EPS1_HALVINGS = 12


@dataclass(frozen=True)
class DomainSpec:
    delta: int
    eps: float
    eps1: float
    eps2: float
    contraction_delta: float | None = None

    def __post_init__(self):
        if self.delta < 3:
            raise ValueError("delta must be >= 3")
        if not (self.eps > 0 and self.eps1 > 0 and self.eps2 > 0):
            raise ValueError("eps, eps1 and eps2 must be positive")

    @property
    def y(self) -> float:
        return y_delta(self.delta)

    @property
    def coords(self) -> CoordinateChange:
        return CoordinateChange(self.y)

    @property
    def segment_end(self) -> float:
        """phi(lam_c), the right end of the real segment D is built around."""
        return self.coords.phi(lambda_critical(self.delta)).real

    @property
    def lam_max(self) -> float:
        return (1 - self.eps) * lambda_critical(self.delta)

    def to_dict(self):
        out = asdict(self)
        out["y"] = self.y
        out["segment_end"] = self.segment_end
        out["lam_max"] = self.lam_max
        return out


def segment_distance(z, a: float, b: float):
    """Distance from z (scalar or array) to the real segment [a, b]."""
    z = np.asarray(z, dtype=complex)
    re = z.real
    dx = np.where(re < a, a - re, np.where(re > b, re - b, 0.0))
    out = np.hypot(dx, z.imag)
    return float(out) if out.ndim == 0 else out


def in_domain(spec: DomainSpec, z) -> bool:
    return segment_distance(z, 0.0, spec.segment_end) < spec.eps1


def in_lambda_region(spec: DomainSpec, lam) -> bool:
    return segment_distance(lam, 0.0, spec.lam_max) < spec.eps2


# -- the multi-argument map -------------------------------------------------

def big_g(delta: int, d: int, lam, zs, y: float | None = None):
    """phi(lam / prod(1 + phi^{-1}(z_i))) for a list of d points."""
    if len(zs) != d:
        raise ValueError(f"expected {d} arguments, got {len(zs)}")
    cc = CoordinateChange(y_delta(delta) if y is None else y)
    total = 0j
    for z in zs:
        if abs(complex(z).imag) >= math.pi:
            raise BranchViolation(f"|Im z| >= pi at z = {z}")
        total += cc.log1p_inv(z)
    return cc.phi(lam * cmath.exp(-total))


def reduce_to_diagonal(zs, y: float | None = None):
    """The z with exp(z) equal to the mean of exp(z_i); big_g(zs) = g(z) at this z."""
    if not len(zs):
        raise ValueError("need at least one point")
    m = sum(cmath.exp(complex(z)) for z in zs) / len(zs)
    if m.imag == 0 and m.real <= 0:
        raise BranchViolation(f"mean of exp(z_i) = {m} is on the non-positive real axis")
    return cmath.log(m)


def _phi_np(x, y):
    return np.log(1 + y * np.log(1 + x))


def _big_g_np(d, lam, zs, y):
    """Vectorized big_g; zs has shape (..., d)."""
    s = ((np.exp(zs) - 1) / y).sum(axis=-1) if d else 0.0
    return _phi_np(lam * np.exp(-s), y)


# -- sampling ----------------------------------------------------------------

def sample_tube(rng, a: float, b: float, r: float, size, edge_frac: float = 0.5):
    """Points of the open tube N([a, b], r); a fraction hugs the boundary."""
    size = tuple(np.atleast_1d(size))
    n = int(np.prod(size))
    s = rng.uniform(a, b, n)
    rad = np.sqrt(rng.uniform(0, 1, n)) * r
    edge = rng.uniform(0, 1, n) < edge_frac
    rad[edge] = r * rng.uniform(0.97, 0.999999, edge.sum())
    ang = rng.uniform(0, 2 * np.pi, n)
    off = rad * np.exp(1j * ang)
    # offsets that would point back across the segment are folded onto its ends
    pts = s + off
    inside = (pts.real >= a) & (pts.real <= b)
    pts = np.where(inside, s + 1j * off.imag, np.where(off.real < 0, a + off, b + off))
    return pts.reshape(size)


def tube_boundary(a: float, b: float, r: float, n: int = 400):
    """Points on the boundary of N([a, b], r)."""
    k = max(4, n // 4)
    t = np.linspace(a, b, k)
    th = np.linspace(-np.pi / 2, np.pi / 2, k)
    return np.concatenate([t + 1j * r, t - 1j * r, b + r * np.exp(1j * th), a - r * np.exp(1j * th)])


# -- Monte-Carlo invariance ---------------------------------------------------

@dataclass
class InvarianceReport:
    delta: int
    d: int
    trials: int
    violations: int
    worst_margin: float
    witness: dict | None = None

    def to_dict(self):
        return asdict(self)


def check_invariance(spec: DomainSpec, d: int, trials: int = 10_000, seed: int = 0,
                     raise_on_violation: bool = True) -> InvarianceReport:
    """Sample lam in Lambda(eps2) and z-tuples in D(eps1); check the image stays in D(eps1)."""
    if not 0 <= d <= spec.delta - 1:
        raise ValueError("need 0 <= d <= delta - 1")
    rng = np.random.default_rng(seed)
    lam = sample_tube(rng, 0.0, spec.lam_max, spec.eps2, trials)
    zs = sample_tube(rng, 0.0, spec.segment_end, spec.eps1, (trials, d)) if d else np.zeros((trials, 0))
    img = _big_g_np(d, lam, zs, spec.y)
    margin = spec.eps1 - segment_distance(img, 0.0, spec.segment_end)
    bad = ~(margin > 0) | ~np.isfinite(img)
    i = int(np.argmin(np.where(np.isfinite(margin), margin, -np.inf)))
    witness = None
    if bad.any():
        j = int(np.flatnonzero(bad)[0])
        witness = {"lam": cjson(lam[j]), "zs": [cjson(z) for z in zs[j]], "image": cjson(img[j])}
    rep = InvarianceReport(spec.delta, d, trials, int(bad.sum()), float(margin[i]), witness)
    if raise_on_violation and rep.violations:
        raise InvarianceViolated(f"{rep.violations} of {trials} images left D(eps1)", witness)
    return rep


# -- constant search -----------------------------------------------------------

def _gprime_np(d, lam, z, y):
    ez = np.exp(z)
    x1 = lam * np.exp(-d * (ez - 1) / y)
    return ez * (-d * x1 / ((1 + x1) * (1 + y * np.log(1 + x1))))


def _dg_dlam_np(d, lam, z, y):
    decay = np.exp(-d * (np.exp(z) - 1) / y)
    x1 = lam * decay
    return y / ((1 + x1) * (1 + y * np.log(1 + x1))) * decay


def find_domain_constants(delta: int, eps: float, resolution: int = 1000,
                          boundary_points: int = 400, safety: float = 0.8) -> DomainSpec:
    """Pick eps1 (halving from 0.05) and eps2 so the invariance argument goes through.

    For each eps1: eps2 is set from the lam-derivative bound
    sup |dg/dlam| <= delta_c eps1 / (2 eps2), then |g'| <= 1 - delta_c/2 is
    checked on D(eps1) x Lambda(eps2) and Re phi^{-1}(D(eps1)) > -0.4.
    Both g' and dg/dlam are holomorphic in z and lam, so their moduli are
    maximal on the product of the two boundaries, which is what gets sampled.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    grid = certify_contraction(delta, eps, resolution)
    dc = grid.certified_delta
    y = y_delta(delta)
    cc = CoordinateChange(y)
    seg = cc.phi(lambda_critical(delta)).real
    lam_max = (1 - eps) * lambda_critical(delta)
    degrees = np.arange(1, delta)[:, None, None]
    eps1 = EPS1_START
    for _ in range(EPS1_HALVINGS + 1):
        zb = tube_boundary(0.0, seg, eps1, boundary_points)
        re_floor = float(np.real(np.exp((np.exp(zb) - 1) / y) - 1).min())
        if re_floor > REAL_PART_FLOOR:
            zr = np.linspace(-eps1, seg, boundary_points)[None, None, :]
            eps2 = eps1
            ok = False
            for _ in range(30):
                lb = tube_boundary(0.0, lam_max, eps2, boundary_points)[None, :, None]
                dgl = np.abs(_dg_dlam_np(np.arange(0, delta)[:, None, None], lb, zr, y)).max()
                if dgl * eps2 <= dc * eps1 / 2:
                    ok = True
                    break
                eps2 = safety * dc * eps1 / (2 * dgl)
            if ok:
                gp = np.abs(_gprime_np(degrees, lb, zb[None, None, :], y)).max()
                if gp <= 1 - dc / 2:
                    return DomainSpec(delta, eps, eps1, float(eps2), dc)
        eps1 /= 2
    raise SearchFailed(f"no admissible (eps1, eps2) after {EPS1_HALVINGS} halvings of eps1")


# -- certificates --------------------------------------------------------------

def graph_hash(g: Graph) -> str:
    return hashlib.sha256(serialize_edge_list(g).encode()).hexdigest()


@dataclass
class Certificate:
    mode: str
    graph_hash: str
    lam: list
    params: dict
    order: list = field(default_factory=list)     # pivots in processing order
    steps: list = field(default_factory=list)
    roots: list = field(default_factory=list)     # per-component final check
    verdict: str = "inconclusive"
    failure: dict | None = None

    def to_dict(self):
        return {
            "mode": self.mode,
            "graph_hash": self.graph_hash,
            "lambda": [cjson(x) for x in self.lam],
            "params": self.params,
            "order": self.order,
            "steps": self.steps,
            "roots": self.roots,
            "verdict": self.verdict,
            "failure": self.failure,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _check_lambda_region(spec, lam):
    for v, x in enumerate(lam):
        if not in_lambda_region(spec, complex(x)):
            raise PreconditionViolated(f"lambda_{v} = {x} is outside Lambda(eps2)")


def certify_graph(g: Graph, lam, spec: DomainSpec) -> Certificate:
    """Certify Z_G(lam) != 0 by keeping every ratio inside phi^{-1}(D(eps1))."""
    lam = tuple(complex(x) for x in as_lambda(g, lam))
    if max_degree(g) > spec.delta:
        raise PreconditionViolated(f"max degree {max_degree(g)} exceeds delta = {spec.delta}")
    _check_lambda_region(spec, lam)
    cc = spec.coords
    seg = spec.segment_end
    cert = Certificate("domain", graph_hash(g), list(lam), spec.to_dict())
    current_root = [None]

    def on_step(step):
        if step.pivot == current_root[0] and len(step.subgraph) == current_comp_size[0]:
            return
        try:
            z = cc.phi(step.ratio)
        except BranchViolation:
            z = complex("nan")
        dist = segment_distance(z, 0.0, seg)
        rec = {"subgraph": list(step.subgraph), "pivot": step.pivot,
               "ratio": cjson(step.ratio), "phi_ratio": cjson(z), "distance": dist}
        cert.order.append(step.pivot)
        cert.steps.append(rec)
        if not dist < spec.eps1:
            cert.failure = {"step": len(cert.steps) - 1, **rec}
            raise OutOfDomain(f"phi(R) left D(eps1) at pivot {step.pivot}",
                              step=len(cert.steps) - 1, certificate=cert)

    current_comp_size = [0]
    eng = RatioEngine(g, lam, on_step=on_step)
    for comp in components(g):
        verts = vertices_of(comp)
        v0 = verts[0]
        current_root[0] = v0
        current_comp_size[0] = len(verts)
        r = eng.ratio(comp, v0)
        nbrs = vertices_of(eng.nbr[v0] & comp)
        rest = comp & ~(1 << v0)
        zs = []
        for u in nbrs:
            zs.append(eng.memo[(eng.component_of(rest, u), u)])
            rest &= ~(1 << u)
        partial = lam[v0]
        for z in zs[:-1]:
            partial = partial / (1 + z)
        try:
            dist = segment_distance(cc.phi(partial), 0.0, seg)
        except BranchViolation:
            dist = math.inf
        last = zs[-1] if zs else 0j
        sep = partial.real + last.real
        root = {"component": verts, "root": v0, "ratio": cjson(r), "partial": cjson(partial),
                "partial_distance": dist, "real_part_sum": sep, "distance_to_minus_one": abs(r + 1)}
        cert.roots.append(root)
        if not (dist < spec.eps1 and sep > -1 and abs(r + 1) > 0):
            cert.failure = {"root": v0, **root}
            raise OutOfDomain(f"root check failed on component of {v0}", certificate=cert)
    cert.verdict = "certified"
    return cert


def replay_certificate(cert: Certificate, g: Graph) -> float:
    """Max |R_recorded - R_direct| with each ratio recomputed from exact sub-partition functions."""
    lam = [complex(x) for x in cert.lam]
    z = ZEvaluator(g, lam)
    nbr = g.neighbor_masks()
    worst = 0.0
    for s in cert.steps:
        mask = 0
        for v in s["subgraph"]:
            mask |= 1 << v
        u = s["pivot"]
        direct = lam[u] * z(mask & ~(nbr[u] | (1 << u))) / z(mask & ~(1 << u))
        rec = complex(s["ratio"]["re"], s["ratio"]["im"])
        worst = max(worst, abs(rec - direct) / max(1.0, abs(direct)))
    return worst


# -- the angle/modulus certificate ----------------------------------------------

def sokal_angle_bounds(delta: int, eps: float) -> tuple[float, float]:
    """(modulus bound tan(pi/((2+eps)(delta-1))), argument bound (eps/2) pi/(2+eps))."""
    return math.tan(math.pi / ((2 + eps) * (delta - 1))), (eps / 2) * math.pi / (2 + eps)


def certify_sokal_angle(g: Graph, lam, eps: float, delta: int | None = None,
                        tol: float = 1e-12) -> Certificate:
    """Certificate for activities of small modulus and small argument.

    Every non-root ratio must satisfy Z != 0 (i), |R| <= tan bound (ii) and
    Re R > 0 (iii); the root ratio's argument is bounded by the sum of the
    arguments of its factors, which stays below (2+eps/2) pi/(2+eps) < pi.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    delta = max(2, max_degree(g)) if delta is None else delta
    if delta < 2:
        raise ValueError("delta must be >= 2")
    if max_degree(g) > delta:
        raise PreconditionViolated(f"max degree {max_degree(g)} exceeds delta = {delta}")
    lam = tuple(complex(x) for x in as_lambda(g, lam))
    mod_bound, arg_bound = sokal_angle_bounds(delta, eps)
    for v, x in enumerate(lam):
        if abs(x) > mod_bound + tol:
            raise PreconditionViolated(f"|lambda_{v}| = {abs(x)} exceeds {mod_bound}")
        if x != 0 and not abs(cmath.phase(x)) < arg_bound:
            raise PreconditionViolated(f"|arg lambda_{v}| = {abs(cmath.phase(x))} is not below {arg_bound}")
    cert = Certificate("sokal-angle", graph_hash(g), list(lam),
                       {"delta": delta, "eps": eps, "modulus_bound": mod_bound, "argument_bound": arg_bound})
    root_info = {"v0": None, "size": 0}

    def on_step(step):
        if step.pivot == root_info["v0"] and len(step.subgraph) == root_info["size"]:
            return
        r = step.ratio
        rec = {"subgraph": list(step.subgraph), "pivot": step.pivot, "ratio": cjson(r),
               "modulus": abs(r), "real_part": r.real}
        cert.order.append(step.pivot)
        cert.steps.append(rec)
        # R = 0 only arises from zero activities; 1 + R = 1 leaves the angle sum unchanged
        for which, ok in (("ii", abs(r) <= mod_bound + tol), ("iii", r.real > 0 or r == 0)):
            if not ok:
                cert.failure = {"condition": which, "step": len(cert.steps) - 1, **rec}
                raise ConditionViolated(f"condition ({which}) fails at pivot {step.pivot}",
                                        which=which, step=len(cert.steps) - 1, certificate=cert)

    eng = RatioEngine(g, lam, on_step=on_step)
    limit = (2 + eps / 2) * math.pi / (2 + eps)
    for comp in components(g):
        verts = vertices_of(comp)
        v0 = verts[0]
        root_info.update(v0=v0, size=len(verts))
        try:
            r = eng.ratio(comp, v0)
        except ConditionViolated:
            raise
        except ZeroDivisionError as exc:
            raise ConditionViolated(f"condition (i) fails: {exc}", which="i", certificate=cert) from exc
        nbrs = vertices_of(eng.nbr[v0] & comp)
        rest = comp & ~(1 << v0)
        angle = abs(cmath.phase(lam[v0])) if lam[v0] != 0 else 0.0
        for u in nbrs:
            angle += abs(cmath.phase(1 + eng.memo[(eng.component_of(rest, u), u)]))
            rest &= ~(1 << u)
        root = {"component": verts, "root": v0, "ratio": cjson(r), "angle_bound": angle,
                "angle_limit": limit, "argument": abs(cmath.phase(r)) if r != 0 else 0.0}
        cert.roots.append(root)
        if not (angle < limit < math.pi and root["argument"] <= angle + tol):
            cert.failure = {"condition": "root", **root}
            raise ConditionViolated(f"root angle bound fails on component of {v0}", which="root",
                                    certificate=cert)
    cert.verdict = "certified"
    return cert
