import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tonguelock.acceptance import random_base, random_family
from tonguelock.base import BasePoint, Rotation
from tonguelock.fiber import ArnoldFamily
from tonguelock.lyapunov import (derivative_integral_check, exponent_bounds, log_derivative_sum,
                                 simpson_weights)
from tonguelock.trigpoly import cosine_forcing

X0 = BasePoint.torus(0.2)


def test_log_derivative_examples():
    assert log_derivative_sum(ArnoldFamily(tau=0.3, beta=0.5), Rotation(), X0, 0.4, 100) == 0.0
    fam = ArnoldFamily(alpha=0.5)
    assert log_derivative_sum(fam, Rotation(), X0, 0.0, 10) == pytest.approx(10 * math.log(1.5))
    assert log_derivative_sum(fam, Rotation(), X0, 0.5, 10) == pytest.approx(10 * math.log(0.5))


@pytest.mark.parametrize("n", [1, 8, 64, 1024])
def test_fixed_points_realize_extremes(n):
    est = exponent_bounds(ArnoldFamily(alpha=0.5), Rotation(), n)
    assert est.upper_L_plus >= math.log(1.5) - 1e-9
    assert est.lower_L_minus <= math.log(0.5) + 1e-9
    assert est.lower_L_minus <= est.upper_L_plus


def test_rigid_exponents_zero():
    est = exponent_bounds(ArnoldFamily(tau=0.2, beta=0.3), Rotation(), 100, 16, 16)
    assert abs(est.upper_L_plus) <= est.margin + 1e-15
    assert abs(est.lower_L_minus) <= est.margin + 1e-15
    assert est.objective == 0.0


def test_chain_rule_additivity():
    fam = ArnoldFamily(tau=0.1, alpha=0.7, beta=0.4)
    base = Rotation()
    x, w = X0, 0.33
    whole = log_derivative_sum(fam, base, x, w, 30)
    parts = 0.0
    for _ in range(30):
        parts += math.log(fam.derivative_at(x.phase, w))
        w = fam.eval_at(x.phase, w)
        x = base.step(x)
    assert whole == pytest.approx(parts, abs=1e-10)


@settings(max_examples=15)
@given(st.integers(0, 10_000))
def test_sign_and_norm_bounds(seed):
    r = np.random.default_rng(seed)
    fam, base = random_family(r), random_base(r)
    est = exponent_bounds(fam, base, 32, 16, 16)
    m = est.margin
    assert est.lower_L_minus <= m
    assert est.upper_L_plus >= -m
    assert max(est.upper_L_plus, -est.lower_L_minus) <= math.log(fam.norm_bound) + m


@settings(max_examples=15)
@given(st.integers(0, 10_000))
def test_superadditive_sup(seed):
    # sup log D(F^{2n}) <= 2 sup log D(F^n), so 2n grid values sit inside the n brackets
    fam = random_family(np.random.default_rng(seed))
    a = exponent_bounds(fam, Rotation(), 16, 16, 16)
    b = exponent_bounds(fam, Rotation(), 32, 16, 16)
    assert b.grid_upper <= a.upper_L_plus + 1e-12
    assert b.grid_lower >= a.lower_L_minus - 1e-12


def test_integral_examples():
    fam = ArnoldFamily(alpha=0.9, tau=0.37, beta=1.0, q=cosine_forcing())
    for n in (1, 6):
        assert derivative_integral_check(fam, Rotation(), X0, n) == pytest.approx(1.0, abs=1e-6)
    assert derivative_integral_check(ArnoldFamily(tau=0.2), Rotation(), X0, 3) == pytest.approx(1.0, abs=1e-15)


@settings(max_examples=10)
@given(st.integers(0, 10_000))
def test_integral_is_one_at_n1(seed):
    r = np.random.default_rng(seed)
    fam, base = random_family(r), random_base(r)
    assert derivative_integral_check(fam, base, base.sample(r), 1) == pytest.approx(1.0, abs=1e-8)


def test_simpson_weights():
    w = simpson_weights(8)
    assert w.sum() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        simpson_weights(7)
