import random

from hypothesis import HealthCheck, settings, strategies as st

from hardcore_zeros.graph import Graph, random_graph

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def graphs(draw, max_n=9, max_deg=None):
    """Arbitrary simple graphs on up to max_n vertices, optionally degree-capped."""
    n = draw(st.integers(0, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    if max_deg is not None:
        deg = [0] * n
        kept = []
        for u, v in chosen:
            if deg[u] < max_deg and deg[v] < max_deg:
                kept.append((u, v))
                deg[u] += 1
                deg[v] += 1
        chosen = kept
    return Graph.from_edges(n, chosen)


def rational_lambdas():
    return st.fractions(min_value=-2, max_value=2, max_denominator=7)


def sample_graphs(count, n_max, max_deg, seed, connected=False, n_min=1):
    rng = random.Random(seed)
    return [random_graph(rng.randint(n_min, n_max), max_deg, rng, connected=connected)
            for _ in range(count)]


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
