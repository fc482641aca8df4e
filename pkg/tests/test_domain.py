import cmath
import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hardcore_zeros.contraction import g_eval
from hardcore_zeros.domain import (DomainSpec, big_g, certify_graph, certify_sokal_angle, check_invariance,
                                   find_domain_constants, in_domain, in_lambda_region, reduce_to_diagonal,
                                   replay_certificate, sample_tube, segment_distance, sokal_angle_bounds)
from hardcore_zeros.errors import InvarianceViolated, OutOfDomain, PreconditionViolated
from hardcore_zeros.graph import path_graph, random_graph, regular_tree, star_graph
from hardcore_zeros.indpoly import z_brute_force, z_eval


@pytest.fixture(scope="module")
def spec3():
    return find_domain_constants(3, 0.1)


@pytest.fixture(scope="module")
def spec4():
    return find_domain_constants(4, 0.1)


def test_in_domain_examples(spec3):
    s = spec3
    assert in_domain(s, 0)
    assert not in_domain(s, s.segment_end + 2 * s.eps1)
    assert in_domain(s, s.segment_end / 2 + 0.99j * s.eps1)
    assert not in_domain(s, s.segment_end / 2 + 1.01j * s.eps1)
    assert in_lambda_region(s, s.lam_max + 0.5 * s.eps2)
    assert not in_lambda_region(s, -2 * s.eps2)


def test_segment_distance_vectorized():
    z = np.array([-1, 0.5 + 2j, 3 + 4j])
    assert list(segment_distance(z, 0, 3)) == pytest.approx([1, 2, 4])


def test_big_g_examples():
    assert big_g(3, 0, 0.7, []) == pytest.approx(g_eval(3, 0, 0.7, 0))
    z = 0.2 + 0.01j
    assert abs(big_g(3, 2, 1.5, [z, z]) - g_eval(3, 2, 1.5, z)) < 1e-12
    with pytest.raises(ValueError):
        big_g(3, 2, 1.0, [0.1])


@given(st.integers(1, 4), st.complex_numbers(max_magnitude=1.6, allow_nan=False, allow_infinity=False),
       st.lists(st.complex_numbers(max_magnitude=0.5, allow_nan=False, allow_infinity=False),
                min_size=4, max_size=4))
def test_big_g_reduces_to_diagonal(d, lam, zs):
    zs = zs[:d]
    z = reduce_to_diagonal(zs)
    try:
        a = big_g(5, d, lam, zs)
        b = g_eval(5, d, lam, z)
    except Exception:
        return
    assert abs(a - b) < 1e-9 * max(1, abs(a))


def test_reduce_to_diagonal_examples():
    assert reduce_to_diagonal([0.3, 0.3]) == pytest.approx(0.3)
    assert reduce_to_diagonal([0, 0]) == 0
    rng = np.random.default_rng(5)
    seg = DomainSpec(3, 0.1, 0.01, 0.01).segment_end
    pts = sample_tube(rng, 0, seg, 0.01, (2000, 2))
    for a, b in pts:
        assert segment_distance(reduce_to_diagonal([a, b]), 0, seg) < 0.01


def test_find_domain_constants(spec3):
    assert spec3.eps1 >= 1e-4 and spec3.eps2 >= 1e-4
    assert spec3.contraction_delta > 0
    s = find_domain_constants(4, 0.2)
    assert s.eps1 > 0 and s.eps2 > 0
    easy = find_domain_constants(3, 0.999)
    assert easy.eps2 > spec3.eps2
    with pytest.raises(ValueError):
        find_domain_constants(3, 1.0)


@pytest.mark.parametrize("d", [0, 1, 2])
def test_invariance_holds(spec3, d):
    rep = check_invariance(spec3, d, trials=3000, seed=d)
    assert rep.violations == 0 and rep.worst_margin > 0


def test_invariance_violated_for_large_tube():
    bad = DomainSpec(3, 0.1, 1.0, 0.5)
    with pytest.raises(InvarianceViolated) as info:
        check_invariance(bad, 2, trials=2000)
    assert info.value.witness is not None


def test_certify_star(spec3):
    cert = certify_graph(star_graph(3), 1.0, spec3)
    assert cert.verdict == "certified"
    assert z_brute_force(star_graph(3), 1) == 9
    assert replay_certificate(cert, star_graph(3)) < 1e-10


def test_certify_deep_tree(spec3):
    t = regular_tree(3, 4)
    cert = certify_graph(t, 3.5, spec3)
    assert cert.verdict == "certified" and z_eval(t, 3.5) != 0


def test_certify_precondition(spec3):
    with pytest.raises(PreconditionViolated):
        certify_graph(path_graph(3), -1.0, spec3)
    with pytest.raises(PreconditionViolated):
        certify_graph(star_graph(4), 1.0, spec3)


def test_certify_multivariate(spec3):
    lam = [0.5, 3.5, 2.0, 3.0 + 0.5j * spec3.eps2]
    cert = certify_graph(path_graph(4), lam, spec3)
    assert cert.verdict == "certified"


def test_out_of_domain_is_reported_not_raised_as_zero():
    # a tube this thin cannot hold the ratios: inconclusive with a failing step
    thin = DomainSpec(3, 0.1, 1e-6, 1e-3)
    with pytest.raises(OutOfDomain) as info:
        certify_graph(path_graph(4), 3.0 + 9e-4j, thin)
    assert info.value.certificate.failure is not None


def test_soundness_random(spec4):
    rng = random.Random(11)
    for _ in range(40):
        g = random_graph(rng.randint(1, 12), 4, rng)
        for _ in range(3):
            t = rng.uniform(0, spec4.lam_max)
            lam = complex(t, rng.uniform(-0.9, 0.9) * spec4.eps2)
            cert = certify_graph(g, lam, spec4)
            z = z_eval(g, lam)
            assert cert.verdict == "certified"
            assert abs(z) > 1e-12 * abs(z_eval(g, abs(lam)))
            assert replay_certificate(cert, g) < 1e-10


def test_sokal_bounds():
    mod, arg = sokal_angle_bounds(3, 1)
    assert mod == pytest.approx(math.tan(math.pi / 6)) and mod == pytest.approx(0.57735, abs=1e-5)
    assert arg == pytest.approx(math.pi / 6)


def test_sokal_path():
    cert = certify_sokal_angle(path_graph(5), 0.5, 1.0, delta=3)
    assert cert.verdict == "certified"
    assert all(s["real_part"] > 0 for s in cert.steps)
    assert z_eval(path_graph(5), 0.5) != 0


def test_sokal_precondition():
    with pytest.raises(PreconditionViolated):
        certify_sokal_angle(path_graph(3), cmath.rect(0.3, math.pi / 4), 1.0, delta=3)
    with pytest.raises(PreconditionViolated):
        certify_sokal_angle(path_graph(3), 0.7, 1.0, delta=3)


@given(st.integers(1, 9), st.floats(0, 0.999), st.floats(-0.999, 0.999))
def test_sokal_steps_within_bounds(n, r, t):
    mod, arg = sokal_angle_bounds(3, 1.0)
    cert = certify_sokal_angle(path_graph(n), cmath.rect(r * mod, t * arg), 1.0, delta=3)
    assert all(s["modulus"] < mod + 1e-12 and (s["real_part"] > 0 or s["modulus"] == 0) for s in cert.steps)
    assert cert.roots[0]["angle_bound"] < cert.roots[0]["angle_limit"] < math.pi
