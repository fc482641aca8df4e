import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hardcore_zeros.contraction import (CoordinateChange, alpha_delta, c_delta, case34_bound_check,
                                        certify_contraction, degree_monotonicity_samples, g_eval,
                                        g_prime, g_second_derivative, tail_start, y_delta,
                                        z_critical)
from hardcore_zeros.dynamics import lambda_critical, x_critical
from hardcore_zeros.errors import BranchViolation, CertificationFailed


def test_y_delta_values():
    # 1/(2 - ln 2) and 1/(1 - ln 3/2) evaluated directly
    assert y_delta(3) == pytest.approx(0.7651977, abs=1e-6)
    assert y_delta(4) == pytest.approx(1.6819869, abs=1e-6)
    for delta in range(3, 9):
        xd, y = x_critical(delta), y_delta(delta)
        assert abs(2 * xd * y - (1 + y * math.log1p(xd))) < 1e-14


def test_phi_examples():
    cc = CoordinateChange.for_delta(3)
    assert cc.phi(0) == 0
    assert cc.phi(1).real == pytest.approx(math.log(1 + y_delta(3) * math.log(2)), abs=1e-14)
    assert cc.phi(1).real == pytest.approx(0.425525, abs=1e-6)
    with pytest.raises(BranchViolation):
        cc.phi(-1.5)


def test_phi_roundtrip_in_tube():
    cc = CoordinateChange.for_delta(3)
    rng = np.random.default_rng(0)
    seg = cc.phi(4).real
    for _ in range(100):
        z = complex(rng.uniform(-0.05, seg + 0.05), rng.uniform(-0.05, 0.05))
        assert abs(cc.phi(cc.phi_inv(z)) - z) < 1e-12


def test_g_examples():
    z = z_critical(3)
    assert abs(g_eval(3, 2, 4, z) - z) < 1e-10
    cc = CoordinateChange.for_delta(3)
    assert g_eval(3, 0, 0.7, 0.3) == pytest.approx(cc.phi(0.7))
    assert g_eval(3, 2, 0.7, 0) == pytest.approx(cc.phi(0.7))
    assert abs(g_prime(3, 2, 4, z) + 1) < 1e-10
    assert abs(g_prime(3, 2, 4, 20)) < 1e-3
    assert g_prime(3, 0, 2.0, 0.4) == 0


@pytest.mark.parametrize("delta", range(3, 8))
def test_parabolic_signature(delta):
    z, lc = z_critical(delta), lambda_critical(delta)
    assert abs(g_prime(delta, delta - 1, lc, z) + 1) < 1e-9
    assert abs(g_second_derivative(delta, delta - 1, lc, z)) < 1e-8
    assert g_second_derivative(delta, delta - 1, lc, 0).real < 0


@pytest.mark.parametrize("delta", range(3, 8))
def test_y_uniqueness(delta):
    lc = lambda_critical(delta)
    for scale in (0.9, 1.1):
        y = scale * y_delta(delta)
        zy = CoordinateChange(y).phi(x_critical(delta)).real
        assert abs(g_second_derivative(delta, delta - 1, lc, zy, y=y)) > 1e-3


def test_derivatives_match_finite_differences():
    rng = random.Random(1)
    h = 1e-5
    worst1 = worst2 = 0.0
    for _ in range(1000):
        delta = rng.randint(3, 7)
        d = rng.randint(0, delta - 1)
        lam = complex(rng.uniform(0, lambda_critical(delta)), rng.uniform(-0.1, 0.1))
        z = complex(rng.uniform(0, 2), rng.uniform(-0.1, 0.1))
        fd = (g_eval(delta, d, lam, z + h) - g_eval(delta, d, lam, z - h)) / (2 * h)
        worst1 = max(worst1, abs(fd - g_prime(delta, d, lam, z)))
        fd2 = (g_prime(delta, d, lam, z + h) - g_prime(delta, d, lam, z - h)) / (2 * h)
        worst2 = max(worst2, abs(fd2 - g_second_derivative(delta, d, lam, z)))
    assert worst1 < 1e-5 and worst2 < 1e-5


def test_c_delta_table():
    for delta, ref in ((5, -0.0450), (6, -0.0809), (7, -0.0887)):
        assert abs(c_delta(delta) - ref) < 5e-4


def test_case34():
    assert alpha_delta(3) == pytest.approx(2.405, abs=1e-3)
    assert alpha_delta(4) == pytest.approx(2.575, abs=1e-3)
    for delta, ref in ((3, -0.9168), (4, -0.8979)):
        rep = case34_bound_check(delta)
        assert abs(rep.minimum - ref) < 2e-3 and rep.minimum >= -0.92
        assert rep.minimum == pytest.approx(rep.closed_form, abs=1e-9)
        assert rep.stationary_minimum >= rep.minimum
    with pytest.raises(ValueError):
        case34_bound_check(5)


@pytest.mark.parametrize("delta", range(3, 7))
def test_degree_monotonicity(delta):
    samples = degree_monotonicity_samples(delta, n_lam=8)
    assert samples
    for d, lam, z0, gd, gmax in samples:
        assert gmax <= gd + 1e-12 and gd <= 1e-12


@pytest.mark.parametrize("delta", range(5, 8))
def test_lambda_monotonicity_large_delta(delta):
    lc = lambda_critical(delta)
    y = y_delta(delta)
    rng = np.random.default_rng(delta)
    for z in rng.uniform(0, tail_start(delta, lc), 20):
        lams = np.sort(rng.uniform(0, lc, 10))
        vals = [g_prime(delta, delta - 1, lam, z).real for lam in lams]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
        cc = CoordinateChange(y)
        for lam in lams[1:]:
            x1 = lam * math.exp(-(delta - 1) * cc.log1p_inv(z).real)
            assert x1 * y - (1 + y * math.log1p(x1)) < 0


@pytest.mark.parametrize("delta", [3, 7])
def test_certify_contraction_succeeds(delta):
    rep = certify_contraction(delta, 0.1, 2000)
    assert rep.certified and rep.certified_delta > 0 and rep.tail_checked


def test_certify_contraction_parabolic_failure():
    with pytest.raises(CertificationFailed) as info:
        certify_contraction(3, 0.0, 1000)
    rep = info.value.report
    assert rep.margin_adjusted_max >= 1 - 1e-3
    assert rep.argmax[0] == 2


def test_certify_deterministic_under_threads():
    a = certify_contraction(4, 0.2, 300, jobs=1)
    b = certify_contraction(4, 0.2, 300, jobs=3)
    assert a.to_dict() == b.to_dict()


@given(st.floats(0.1, 4.0), st.floats(0.0, 3.0))
def test_tail_bound_holds(lam, z):
    lam_max = 0.9 * lambda_critical(3)
    zt = tail_start(3, lam_max)
    if lam > lam_max or z < zt:
        return
    for d in (1, 2):
        assert abs(g_prime(3, d, lam, zt + z)) < 0.5
