"""Exact independence polynomials.

``z_eval`` and ``z_coeffs`` run the same vertex-deletion recurrence

    Z[S] = lam_v * Z[S \\ N[v]] + Z[S - v]

over induced vertex subsets ``S`` (bitmasks), memoized per call, splitting
into connected components and switching to a linear leaf-to-root pass once a
component is a tree.  Arithmetic is generic: ``int``/``Fraction`` activities
stay exact, ``complex`` activities use floating point, ``mpmath.mpc`` works too.
"""

from __future__ import annotations

import numbers
import sys
from collections import OrderedDict
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import GraphTooLarge, RootFindingError
from .graph import Graph, components, vertices_of

BRUTE_FORCE_MAX_N = 30
DEFAULT_CACHE_BYTES = 256 * 2**20
_BYTES_PER_ENTRY = 160


def as_lambda(g: Graph, lam) -> tuple:
    """Normalize a scalar or per-vertex activity into a length-n tuple."""
    if isinstance(lam, (numbers.Number,)) or _is_mp(lam):
        vals = (lam,) * g.n
    else:
        vals = tuple(lam)
        if len(vals) != g.n:
            raise ValueError(f"activity vector has length {len(vals)}, graph has {g.n} vertices")
    for x in vals:
        if isinstance(x, (float, complex)) and not np.isfinite(complex(x)):
            raise ValueError("activities must be finite")
    return vals


def _is_mp(x) -> bool:
    return type(x).__module__.startswith("mpmath")


def exact_lambda(values) -> tuple:
    """Convert real rationals (ints, Fractions, decimal strings) to Fractions."""
    return tuple(Fraction(v) for v in values)


# -- brute force ------------------------------------------------------------

def independent_sets(g: Graph):
    """Yield every independent set of ``g`` as a bitmask (DFS with pruning)."""
    if g.n > BRUTE_FORCE_MAX_N:
        raise GraphTooLarge(f"enumeration capped at n <= {BRUTE_FORCE_MAX_N}, got {g.n}")
    nbr = g.neighbor_masks()

    def rec(v, chosen, blocked):
        if v == g.n:
            yield chosen
            return
        yield from rec(v + 1, chosen, blocked)
        if not (blocked >> v) & 1:
            yield from rec(v + 1, chosen | (1 << v), blocked | nbr[v])

    yield from rec(0, 0, 0)


def z_brute_force(g: Graph, lam):
    """Sum over independent sets of the product of activities."""
    lam = as_lambda(g, lam)
    total = 0
    for s in independent_sets(g):
        term = 1
        for v in vertices_of(s):
            term = term * lam[v]
        total = total + term
    return total


def coeffs_brute_force(g: Graph) -> list[int]:
    counts = {}
    for s in independent_sets(g):
        k = bin(s).count("1")
        counts[k] = counts.get(k, 0) + 1
    return [counts[k] for k in range(max(counts) + 1)]


# -- recurrence engine ------------------------------------------------------

class _Recurrence:
    """Memoized deletion recurrence over an abstract commutative algebra."""

    def __init__(self, g: Graph, weight: Callable[[int, object], object],
                 one, add, mul, cache_bytes: int = DEFAULT_CACHE_BYTES):
        self.g = g
        self.nbr = g.neighbor_masks()
        self.weight = weight
        self.one = one
        self.add = add
        self.mul = mul
        self.cache: OrderedDict[int, object] = OrderedDict()
        self.max_entries = max(1024, cache_bytes // _BYTES_PER_ENTRY)

    def _lookup(self, mask):
        val = self.cache.get(mask)
        if val is not None:
            self.cache.move_to_end(mask)
        return val

    def _store(self, mask, val):
        self.cache[mask] = val
        if len(self.cache) > self.max_entries:
            self.cache.popitem(last=False)

    def value(self, mask: int):
        if mask == 0:
            return self.one
        hit = self._lookup(mask)
        if hit is not None:
            return hit
        comps = components(self.g, mask)
        if len(comps) > 1:
            out = self.one
            for c in comps:
                out = self.mul(out, self.value(c))
        else:
            out = self._connected(mask)
        self._store(mask, out)
        return out

    def _connected(self, mask: int):
        verts = vertices_of(mask)
        degs = [(self.nbr[v] & mask).bit_count() for v in verts]
        if sum(degs) == 2 * (len(verts) - 1):
            return self._tree(mask, verts[degs.index(max(degs))])
        pivot = verts[degs.index(max(degs))]
        with_pivot = self.weight(pivot, self.value(mask & ~(self.nbr[pivot] | (1 << pivot))))
        return self.add(with_pivot, self.value(mask & ~(1 << pivot)))

    def _tree(self, mask: int, root: int):
        # (Z of subtree with v excluded, Z of subtree with v included)
        order, parent = [root], {root: -1}
        i = 0
        while i < len(order):
            v = order[i]
            i += 1
            for u in vertices_of(self.nbr[v] & mask):
                if u != parent[v]:
                    parent[u] = v
                    order.append(u)
        out_ex: dict[int, object] = {}
        out_in: dict[int, object] = {}
        for v in reversed(order):
            ex, inc_prod = self.one, self.one
            for u in vertices_of(self.nbr[v] & mask):
                if u == parent[v]:
                    continue
                ex = self.mul(ex, self.add(out_ex[u], out_in[u]))
                inc_prod = self.mul(inc_prod, out_ex[u])
                del out_ex[u], out_in[u]
            out_ex[v] = ex
            out_in[v] = self.weight(v, inc_prod)
        return self.add(out_ex[root], out_in[root])


def _ensure_recursion(n: int):
    need = 4 * n + 200
    if sys.getrecursionlimit() < need:
        sys.setrecursionlimit(need)


def z_eval(g: Graph, lam, mask: int | None = None, cache_bytes: int = DEFAULT_CACHE_BYTES):
    """Evaluate Z of ``g[mask]`` (whole graph by default) at the given activities."""
    lam = as_lambda(g, lam)
    _ensure_recursion(g.n)
    rec = _Recurrence(g, lambda v, x: lam[v] * x, 1, lambda a, b: a + b,
                      lambda a, b: a * b, cache_bytes)
    return rec.value(g.full_mask if mask is None else mask)


class ZEvaluator:
    """Reusable evaluator for many subsets of one graph at fixed activities."""

    def __init__(self, g: Graph, lam, cache_bytes: int = DEFAULT_CACHE_BYTES):
        self.g = g
        self.lam = as_lambda(g, lam)
        _ensure_recursion(g.n)
        self._rec = _Recurrence(g, lambda v, x: self.lam[v] * x, 1, lambda a, b: a + b,
                                lambda a, b: a * b, cache_bytes)

    def __call__(self, mask: int):
        return self._rec.value(mask)


# -- polynomial arithmetic on ascending int coefficient lists ----------------

def poly_add(p: list, q: list) -> list:
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for i, c in enumerate(q):
        out[i] += c
    return out


def poly_mul(p: list, q: list) -> list:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def poly_eval(p: Sequence, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def z_coeffs(g: Graph, cache_bytes: int = DEFAULT_CACHE_BYTES) -> list[int]:
    """Integer coefficients c_0..c_m of the univariate polynomial (ascending)."""
    _ensure_recursion(g.n)
    rec = _Recurrence(g, lambda v, p: [0] + p, [1], poly_add, poly_mul, cache_bytes)
    return rec.value(g.full_mask)


def roots_univariate(coeffs: Sequence, tol: float = 1e-10, max_polish: int = 60) -> list[complex]:
    """All complex roots of an ascending coefficient list.

    Companion-matrix eigenvalues (``numpy.roots``) followed by Newton polishing.
    Raises ``RootFindingError`` if any root misses the backward-error test
    ``|p(r)| / sum_k |c_k| |r|^k < tol``.
    """
    c = [complex(x) for x in coeffs]
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    if len(c) < 2:
        raise ValueError("polynomial has degree < 1")
    dp = [i * c[i] for i in range(1, len(c))]
    roots = []
    for r in np.roots(c[::-1]):
        r = complex(r)
        for _ in range(max_polish):
            val = poly_eval(c, r)
            der = poly_eval(dp, r)
            if der == 0:
                break
            step = val / der
            new = r - step
            if abs(poly_eval(c, new)) >= abs(val):
                break
            r = new
            if abs(step) <= 1e-16 * max(1.0, abs(r)):
                break
        resid = abs(poly_eval(c, r)) / poly_eval([abs(x) for x in c], abs(r))
        if not resid < tol:
            raise RootFindingError(f"root {r} has relative residual {resid:.3e} >= {tol}")
        roots.append(r)
    return sorted(roots, key=lambda z: (z.real, z.imag))
