import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hardcore_zeros.errors import PoleHit, ZeroDenominator
from hardcore_zeros.graph import Graph, complete_graph, path_graph, regular_tree, star_graph
from hardcore_zeros.indpoly import ZEvaluator, z_eval
from hardcore_zeros.ratio import (nonvanishing_via_ratio, ratio_direct, ratio_via_elimination,
                                  tree_ratio_orbit)

from conftest import graphs


def test_direct_examples():
    assert ratio_direct(Graph.from_edges(1, []), 0, Fraction(3, 7)) == Fraction(3, 7)
    assert ratio_direct(complete_graph(2), 0, Fraction(1)) == Fraction(1, 2)
    assert ratio_direct(path_graph(3), 1, Fraction(1)) == Fraction(1, 4)


def test_direct_zero_denominator():
    # Z(K2 - 0) = 1 + lam vanishes at lam = -1
    with pytest.raises(ZeroDenominator):
        ratio_direct(complete_graph(2), 0, Fraction(-1))


def test_elimination_examples():
    g = Graph.from_edges(4, [(1, 2)])
    r, _ = ratio_via_elimination(g, 0, Fraction(5))
    assert r == 5
    assert ratio_via_elimination(complete_graph(2), 0, Fraction(1))[0] == Fraction(1, 2)
    assert ratio_via_elimination(star_graph(3), 0, Fraction(1))[0] == Fraction(1, 8)


def test_elimination_reports_failing_subgraph():
    with pytest.raises(ZeroDenominator) as info:
        ratio_via_elimination(path_graph(3), 0, Fraction(-1))
    assert info.value.subgraph is not None


def test_neighbors_eliminated_in_ascending_order():
    _, trace = ratio_via_elimination(star_graph(4), 0, 0.3)
    root = trace.steps[-1]
    assert root.pivot == 0 and list(root.neighbors) == [1, 2, 3, 4]


def test_nonvanishing_examples():
    assert not nonvanishing_via_ratio(Graph.from_edges(1, []), -1)
    assert not nonvanishing_via_ratio(complete_graph(2), -0.5)
    assert not nonvanishing_via_ratio(complete_graph(2), Fraction(-1, 2))
    assert nonvanishing_via_ratio(complete_graph(2), 1)


def test_tree_orbit_examples():
    assert tree_ratio_orbit(3, 0, 0.7) == 0.7
    assert tree_ratio_orbit(3, 1, Fraction(1)) == Fraction(1, 4)
    assert tree_ratio_orbit(3, 2, Fraction(1)) == Fraction(16, 25)
    assert ratio_direct(regular_tree(3, 2), 0, Fraction(1)) == Fraction(16, 25)


def test_tree_orbit_pole():
    # f(-1/2) with d = 2: lam = -1 then x1 = -1/(1-1)^2 blows up immediately at step 1
    with pytest.raises(PoleHit) as info:
        tree_ratio_orbit(2, 3, -1)
    assert info.value.step == 0


@pytest.mark.parametrize("delta", [3, 4])
def test_tree_orbit_matches_direct(delta):
    rng = random.Random(delta)
    for k in range(0, 7):
        if (delta - 1) ** k > 100:
            continue
        t = regular_tree(delta, k)
        for _ in range(20):
            lam = complex(rng.uniform(0, 1.5), rng.uniform(-1, 1))
            a, b = tree_ratio_orbit(delta, k, lam), ratio_direct(t, 0, lam)
            assert abs(a - b) <= 1e-9 * max(1, abs(b))


lams = st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False)


def _safe(g, lam):
    return all(abs(z) > 1e-6 for z in (ZEvaluator(g, lam)(m) for m in range(1 << g.n)))


@given(graphs(max_n=8), lams, st.data())
def test_fundamental_identity(g, lam, data):
    if g.n == 0 or not _safe(g, lam):
        return
    v = data.draw(st.integers(0, g.n - 1))
    ev = ZEvaluator(g, lam)
    r = ratio_direct(g, v, lam)
    z_minus = ev(g.full_mask & ~(1 << v))
    assert abs(ev(g.full_mask) - z_minus * (1 + r)) <= 1e-10 * max(1, abs(ev(g.full_mask)))


@given(graphs(max_n=8), lams, st.data())
def test_telescoping_product(g, lam, data):
    if g.n == 0 or not _safe(g, lam):
        return
    v = data.draw(st.integers(0, g.n - 1))
    r, trace = ratio_via_elimination(g, v, lam)
    root = trace.steps[-1]
    assert root.pivot == v
    prod = 1
    for f in root.factors:
        prod *= f
    comp = sum(1 << u for u in root.subgraph)
    nbr = g.neighbor_masks()[v]
    ev = ZEvaluator(g, lam)
    expect = ev(comp & ~(1 << v)) / ev(comp & ~(nbr | (1 << v)))
    assert abs(prod - expect) <= 1e-10 * max(1, abs(expect))
    assert abs(r - ratio_direct(g, v, lam)) <= 1e-9 * max(1, abs(r))
    assert max(trace.replay_errors([lam] * g.n), default=0) <= 1e-12 * max(1, abs(r))


@given(graphs(max_n=8), st.fractions(min_value=0, max_value=3, max_denominator=5))
def test_nonvanishing_agrees_with_z(g, lam):
    assert nonvanishing_via_ratio(g, lam) == (z_eval(g, lam) != 0)


def test_trace_json_roundtrip():
    _, trace = ratio_via_elimination(path_graph(4), 0, 0.5 + 0.1j)
    obj = json.loads(trace.to_json())
    assert len(obj["steps"]) == len(trace.steps)
    assert obj["steps"][-1]["pivot"] == 0
