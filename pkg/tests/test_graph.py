import random

import pytest
from hypothesis import given, strategies as st

from hardcore_zeros.errors import GraphError
from hardcore_zeros.graph import (Graph, closed_neighborhood, complete_graph, cycle_graph,
                                  disjoint_union, is_claw_free, max_degree, parse_edge_list,
                                  path_graph, random_graph, regular_tree, remove_closed_neighborhood,
                                  remove_vertices, serialize_edge_list, star_graph, tree_levels)

from conftest import graphs


def test_parse_single_edge():
    g = parse_edge_list("0 1")
    assert (g.n, g.edges()) == (2, [(0, 1)])


def test_parse_triangle():
    assert parse_edge_list("0 1\n1 2\n2 0").edges() == complete_graph(3).edges()


def test_parse_deduplicates():
    assert parse_edge_list("0 1\n0 1\n1 0").num_edges == 1


def test_parse_header_and_comments():
    g = parse_edge_list("# comment\np 5\n0 1\n\n3 4\n")
    assert g.n == 5 and g.edges() == [(0, 1), (3, 4)]


def test_loop_rejected_with_line_number():
    with pytest.raises(GraphError, match="line 2"):
        parse_edge_list("0 1\n2 2\n")


def test_strip_loops_deletes_vertex():
    g = parse_edge_list("0 1\n1 2\n1 1\n", strip_loops=True)
    assert g.n == 2 and g.num_edges == 0


@pytest.mark.parametrize("text", ["0 x", "0 1 2", "-1 2", "p 1\n0 1"])
def test_parse_errors(text):
    with pytest.raises(GraphError):
        parse_edge_list(text)


def test_regular_tree_small():
    assert regular_tree(3, 0).n == 1
    t = regular_tree(3, 1)
    assert t.n == 3 and t.degree(0) == 2 and max_degree(t) == 2
    t = regular_tree(3, 2)
    assert t.n == 7 and max_degree(t) == 3


@pytest.mark.parametrize("delta", range(2, 7))
@pytest.mark.parametrize("k", range(0, 9))
def test_regular_tree_vertex_count(delta, k):
    if (delta - 1) ** k > 5000:
        pytest.skip("large")
    t = regular_tree(delta, k)
    assert t.n == sum((delta - 1) ** i for i in range(k + 1))
    assert t.num_edges == t.n - 1
    assert len(tree_levels(delta, k)) == t.n
    if k >= 2:
        assert max_degree(t) == delta


def test_removals():
    assert remove_closed_neighborhood(complete_graph(3), 0)[0].n == 0
    p3 = path_graph(3)
    assert remove_closed_neighborhood(p3, 1)[0].n == 0
    h, origin = remove_vertices(p3, [2])
    assert h.edges() == [(0, 1)] and origin == [0, 1]
    with pytest.raises(GraphError):
        closed_neighborhood(p3, 3)
    with pytest.raises(GraphError):
        remove_vertices(p3, [5])


def test_origin_map_names_original_vertices():
    g = cycle_graph(6)
    h, origin = remove_vertices(g, [0, 3])
    assert origin == [1, 2, 4, 5]
    assert h.edges() == [(0, 1), (2, 3)]


def test_claw_free_examples():
    assert not is_claw_free(star_graph(3))
    assert all(is_claw_free(path_graph(n)) for n in range(1, 9))
    assert is_claw_free(cycle_graph(5))


@given(graphs())
def test_adjacency_symmetric(g):
    for v in range(g.n):
        for u in g.adjacency[v]:
            assert v in g.adjacency[u]
    assert max_degree(g) == max((len(a) for a in g.adjacency), default=0)


@given(graphs(), st.data())
def test_removal_commutes(g, data):
    u = data.draw(st.sets(st.integers(0, max(g.n - 1, 0)))) if g.n else set()
    w = data.draw(st.sets(st.integers(0, max(g.n - 1, 0)))) if g.n else set()
    assert remove_vertices(g, [])[0] == g
    h1, o1 = remove_vertices(g, sorted(u))
    keep = [i for i, v in enumerate(o1) if v not in w]
    drop = [i for i in range(h1.n) if i not in keep]
    h2, o2 = remove_vertices(h1, drop)
    h3, o3 = remove_vertices(g, sorted(u | w))
    assert h2 == h3
    assert [o1[i] for i in o2] == o3


@given(graphs())
def test_serialize_roundtrip(g):
    text = serialize_edge_list(g)
    assert parse_edge_list(text) == g
    assert serialize_edge_list(parse_edge_list(text)) == text


@given(st.integers(1, 14), st.integers(1, 5), st.integers(0, 10**6), st.booleans())
def test_random_graph_respects_degree(n, max_deg, seed, connected):
    if connected and max_deg < 2 and n > 2:
        return
    g = random_graph(n, max_deg, random.Random(seed), connected=connected)
    assert g.n == n and max_degree(g) <= max_deg
    if connected:
        from hardcore_zeros.graph import is_connected
        assert is_connected(g)


def test_disjoint_union_sizes():
    g = disjoint_union(path_graph(3), cycle_graph(4))
    assert g.n == 7 and g.num_edges == 6
    assert isinstance(g, Graph)
