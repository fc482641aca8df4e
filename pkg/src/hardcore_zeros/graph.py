"""Simple undirected graphs and the induced-subgraph operations used by the recurrences.

Vertex subsets are passed around as Python ``int`` bitmasks (bit ``v`` set iff
vertex ``v`` is in the set).  Python integers are unbounded so the same
representation serves every graph size.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .errors import GraphError


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph on vertices ``0..n-1``."""

    n: int
    adjacency: tuple[frozenset[int], ...]

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise GraphError("adjacency length does not match n")
        for v, nbrs in enumerate(self.adjacency):
            if v in nbrs:
                raise GraphError(f"self-loop at vertex {v}")
            for u in nbrs:
                if not 0 <= u < self.n:
                    raise GraphError(f"neighbor {u} of {v} out of range")
                if v not in self.adjacency[u]:
                    raise GraphError(f"asymmetric adjacency between {u} and {v}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            adj[u].add(v)
            adj[v].add(u)
        return cls(n, tuple(frozenset(s) for s in adj))

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def neighbors(self, v: int) -> list[int]:
        self._check_vertex(v)
        return sorted(self.adjacency[v])

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u in range(self.n) for v in self.adjacency[u] if u < v)

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def neighbor_masks(self) -> list[int]:
        masks = []
        for nbrs in self.adjacency:
            m = 0
            for u in nbrs:
                m |= 1 << u
            masks.append(m)
        return masks

    def _check_vertex(self, v: int):
        if not 0 <= v < self.n:
            raise GraphError(f"vertex {v} out of range for n={self.n}")

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.edges()})"


# -- construction -----------------------------------------------------------

def parse_edge_list(text: str, strip_loops: bool = False) -> Graph:
    """Parse ``u v`` lines with an optional ``p <n>`` header.

    Blank lines and lines starting with ``#`` or ``c`` are ignored.  Duplicate
    edges collapse.  Loops are rejected unless ``strip_loops`` is set, in which
    case the looped vertex is deleted together with its edges (a looped vertex
    can never be in an independent set); the returned graph is then relabelled
    densely.
    """
    n_header = None
    edges = []
    looped = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("c "):
            continue
        tokens = line.split()
        if tokens[0] == "p":
            if len(tokens) != 2 or not re.fullmatch(r"\d+", tokens[1]):
                raise GraphError(f"line {lineno}: malformed header {raw!r}")
            n_header = int(tokens[1])
            continue
        if len(tokens) != 2 or not all(re.fullmatch(r"\d+", t) for t in tokens):
            raise GraphError(f"line {lineno}: expected two non-negative integers, got {raw!r}")
        u, v = int(tokens[0]), int(tokens[1])
        if u == v:
            if not strip_loops:
                raise GraphError(f"line {lineno}: loop edge at vertex {u}")
            looped.add(u)
            continue
        edges.append((u, v))
    n = max((max(e) for e in edges), default=-1) + 1
    n = max(n, max(looped, default=-1) + 1)
    if n_header is not None:
        if n_header < n:
            raise GraphError(f"header declares n={n_header} but vertex {n - 1} appears")
        n = n_header
    g = Graph.from_edges(n, edges)
    if looped:
        mask = 0
        for v in looped:
            mask |= 1 << v
        g, _ = remove_vertices(g, mask)
    return g


def serialize_edge_list(g: Graph) -> str:
    """Canonical text form: ``p n`` header then lexicographically sorted edges."""
    lines = [f"p {g.n}"] + [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def regular_tree(delta: int, k: int) -> Graph:
    """The rooted tree T_{delta,k}; root is vertex 0 and ids follow BFS order."""
    if delta < 2:
        raise GraphError("regular_tree needs delta >= 2")
    if k < 0:
        raise GraphError("depth must be non-negative")
    branch = delta - 1
    edges = []
    level = [0]
    n = 1
    for _ in range(k):
        nxt = []
        for parent in level:
            for _ in range(branch):
                edges.append((parent, n))
                nxt.append(n)
                n += 1
        level = nxt
    return Graph.from_edges(n, edges)


def tree_levels(delta: int, k: int) -> list[int]:
    """Depth of every vertex of ``regular_tree(delta, k)`` (root has depth 0)."""
    depths = [0]
    level_size = 1
    for depth in range(1, k + 1):
        level_size *= delta - 1
        depths.extend([depth] * level_size)
    return depths


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycle needs n >= 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, combinations(range(n), 2))


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def disjoint_union(g: Graph, h: Graph) -> Graph:
    edges = g.edges() + [(u + g.n, v + g.n) for u, v in h.edges()]
    return Graph.from_edges(g.n + h.n, edges)


def random_graph(n: int, max_deg: int, rng: random.Random, p: float = 0.5,
                 connected: bool = False) -> Graph:
    """Random graph with maximum degree at most ``max_deg``.

    Candidate edges are visited in random order and kept with probability ``p``
    when both endpoints still have spare degree.  With ``connected`` a random
    spanning tree of degree <= ``max_deg`` is laid down first.
    """
    deg = [0] * n
    edges = set()
    if connected and n > 1:
        if max_deg < 2 and n > 2:
            raise GraphError("cannot build a connected graph on >2 vertices with max degree < 2")
        order = list(range(n))
        rng.shuffle(order)
        for i in range(1, n):
            choices = [u for u in order[:i] if deg[u] < max_deg]
            u = rng.choice(choices)
            v = order[i]
            edges.add((min(u, v), max(u, v)))
            deg[u] += 1
            deg[v] += 1
    pairs = list(combinations(range(n), 2))
    rng.shuffle(pairs)
    for u, v in pairs:
        if (u, v) in edges or deg[u] >= max_deg or deg[v] >= max_deg:
            continue
        if rng.random() < p:
            edges.add((u, v))
            deg[u] += 1
            deg[v] += 1
    return Graph.from_edges(n, edges)


# -- subgraph operations ----------------------------------------------------

def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def vertices_of(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def closed_neighborhood(g: Graph, v: int) -> int:
    """N[v] as a bitmask."""
    g._check_vertex(v)
    return mask_of(g.adjacency[v]) | (1 << v)


def remove_vertices(g: Graph, removed: int | Sequence[int]) -> tuple[Graph, list[int]]:
    """Induced subgraph on the complement of ``removed``.

    Returns ``(H, origin)`` where ``origin[i]`` is the id in ``g`` of vertex
    ``i`` of ``H``.  Kept vertices retain their relative order.
    """
    if not isinstance(removed, int):
        for v in removed:
            g._check_vertex(v)
        removed = mask_of(removed)
    elif removed >> g.n:
        raise GraphError("vertex set contains ids >= n")
    origin = [v for v in range(g.n) if not (removed >> v) & 1]
    new_id = {v: i for i, v in enumerate(origin)}
    edges = [(new_id[u], new_id[v]) for u, v in g.edges() if u in new_id and v in new_id]
    return Graph.from_edges(len(origin), edges), origin


def remove_closed_neighborhood(g: Graph, v: int) -> tuple[Graph, list[int]]:
    return remove_vertices(g, closed_neighborhood(g, v))


def induced_subgraph(g: Graph, mask: int) -> tuple[Graph, list[int]]:
    return remove_vertices(g, g.full_mask & ~mask)


def max_degree(g: Graph) -> int:
    return max((len(a) for a in g.adjacency), default=0)


def components(g: Graph, mask: int | None = None) -> list[int]:
    """Connected components of ``g[mask]`` as bitmasks, ordered by lowest vertex."""
    nbr = g.neighbor_masks()
    remaining = g.full_mask if mask is None else mask
    comps = []
    while remaining:
        seed = remaining & -remaining
        comp = seed
        frontier = seed
        while frontier:
            low = frontier & -frontier
            frontier ^= low
            new = nbr[low.bit_length() - 1] & remaining & ~comp
            comp |= new
            frontier |= new
        comps.append(comp)
        remaining &= ~comp
    return comps


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or len(components(g)) == 1


def is_claw_free(g: Graph) -> bool:
    """True iff no vertex has three pairwise non-adjacent neighbors."""
    for v in range(g.n):
        for a, b, c in combinations(sorted(g.adjacency[v]), 3):
            if b not in g.adjacency[a] and c not in g.adjacency[a] and c not in g.adjacency[b]:
                return False
    return True
