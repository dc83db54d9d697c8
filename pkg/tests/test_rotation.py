import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tonguelock.acceptance import random_family
from tonguelock.base import BasePoint, Odometer, Rotation, SkewShift
from tonguelock.fiber import ArnoldFamily
from tonguelock.rotation import (displacement_bounds, lipschitz_margin, rho_orbit_estimate,
                                 rotation_enclosure, side_bound)


def test_rigid_stats_constant():
    st_ = displacement_bounds(ArnoldFamily(tau=1 / 3), Rotation(), 300)
    assert st_.m_lo == pytest.approx(100.0, abs=1e-10)
    assert st_.m_hi == pytest.approx(100.0, abs=1e-10)
    assert st_.margin < 1e-9
    assert st_.rigor == "rigorous"


def test_fixed_point_inside_bounds():
    st_ = displacement_bounds(ArnoldFamily(alpha=0.5), Rotation(), 50)
    assert st_.m_lo <= 0.0 <= st_.m_hi


def test_eps_shift_linear_for_rigid():
    fam = ArnoldFamily(tau=0.2)
    a = displacement_bounds(fam, Rotation(), 50)
    b = displacement_bounds(fam, Rotation(), 50, eps=0.01)
    assert b.m_lo - a.m_lo == pytest.approx(0.5, abs=1e-10)
    assert b.m_hi - a.m_hi == pytest.approx(0.5, abs=1e-10)


def test_rigid_enclosure():
    enc = rotation_enclosure(ArnoldFamily(tau=1 / 3), Rotation(), 10_000)
    assert 1 / 3 in enc
    assert enc.width < 1e-9
    assert not enc.flagged


def test_locked_enclosure_contains_zero():
    enc = rotation_enclosure(ArnoldFamily(alpha=0.5), Rotation(), 1000)
    assert 0.0 in enc


def test_rigor_label():
    fam = ArnoldFamily(tau=0.1, alpha=0.2, beta=0.1)
    assert displacement_bounds(fam, SkewShift(), 20, 8, 8).rigor == "heuristic"
    assert displacement_bounds(fam, Odometer((2,), 8), 20, 8, 8).rigor == "heuristic"


def test_rho_examples():
    x = BasePoint.torus(0.0)
    assert rho_orbit_estimate(ArnoldFamily(tau=0.3), Rotation(), x, 0.0, 1000) == pytest.approx(0.3, abs=1e-12)
    assert abs(rho_orbit_estimate(ArnoldFamily(alpha=0.5), Rotation(), x, 0.25, 10_000)) < 1e-3


def test_rho_independent_of_start():
    fam = ArnoldFamily(tau=0.3, alpha=0.4)
    n = 100_000
    a = rho_orbit_estimate(fam, Rotation(), BasePoint.torus(0.0), 0.0, n)
    b = rho_orbit_estimate(fam, Rotation(), BasePoint.torus(0.7), 0.55, n)
    assert abs(a - b) <= 2 / n + 1e-6


@settings(max_examples=10)
@given(st.integers(0, 5000))
def test_enclosure_holds_true_orbits(seed):
    r = np.random.default_rng(seed)
    fam = random_family(r)
    base = Rotation()
    n = 64
    st_ = displacement_bounds(fam, base, n, 16, 16)
    for _ in range(10):
        x = base.sample(r)
        d = rho_orbit_estimate(fam, base, x, r.uniform(), n) * n
        assert st_.lo_bound - 1e-9 <= d <= st_.hi_bound + 1e-9
    assert st_.margin >= 0


@settings(max_examples=10)
@given(st.integers(0, 5000))
def test_width_doubling(seed):
    fam = random_family(np.random.default_rng(seed))
    a = displacement_bounds(fam, Rotation(), 64, 16, 16)
    b = displacement_bounds(fam, Rotation(), 128, 16, 16)
    wa = (a.hi_bound - a.lo_bound) / 64
    wb = (b.hi_bound - b.lo_bound) / 128
    assert wb <= wa + 2 * (a.margin / 64 + b.margin / 128) + 1e-12


def test_side_bound_brackets_grid_extremes():
    fam = ArnoldFamily(tau=0.2, alpha=0.5, beta=0.2)
    st_ = displacement_bounds(fam, Rotation(), 200, 16, 16)
    hi, _ = side_bound(fam, Rotation(), 200, 16, 16, 0.0, +1)
    lo, _ = side_bound(fam, Rotation(), 200, 16, 16, 0.0, -1)
    assert hi >= st_.m_hi and lo <= st_.m_lo


def test_lipschitz_margin_zero_for_rigid():
    assert lipschitz_margin(ArnoldFamily(tau=0.4), 1000, 8, 8) == 0.0


def test_argument_guards():
    with pytest.raises(ValueError):
        rotation_enclosure(ArnoldFamily(), Rotation(), 0)
    with pytest.raises(ValueError):
        displacement_bounds(ArnoldFamily(), Rotation(), 10, 1, 8)
