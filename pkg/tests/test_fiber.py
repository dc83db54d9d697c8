import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tonguelock.acceptance import random_base, random_family
from tonguelock.base import BasePoint, Odometer, Rotation
from tonguelock.fiber import (ArnoldFamily, PFamily, TrigLift, displacement_orbit, lift_derivative,
                              lift_eval, lift_inverse)
from tonguelock.trigpoly import TrigPoly

X0 = BasePoint.torus(0.3)


def test_rigid_eval():
    assert lift_eval(ArnoldFamily(tau=0.25), X0, 0.5) == pytest.approx(0.75)


def test_fixed_point_eval():
    assert lift_eval(ArnoldFamily(alpha=0.5), X0, 0.0) == 0.0


def test_sine_eval():
    v = lift_eval(ArnoldFamily(alpha=0.5), X0, 0.45)
    assert v == pytest.approx(0.45 + 0.5 / (2 * math.pi) * math.sin(0.9 * math.pi), abs=1e-14)
    assert v == pytest.approx(0.47459, abs=1e-5)


@pytest.mark.parametrize("y,expected", [(0.0, 1.5), (0.5, 0.5)])
def test_derivative_at_fixed_points(y, expected):
    assert lift_derivative(ArnoldFamily(alpha=0.5), X0, y) == pytest.approx(expected)


def test_rigid_derivative():
    assert lift_derivative(ArnoldFamily(tau=0.7, beta=0.4), X0, 0.123) == 1.0


def test_inverse_examples():
    assert lift_inverse(ArnoldFamily(tau=0.25), X0, 0.75) == pytest.approx(0.5, abs=1e-12)
    fam = ArnoldFamily(alpha=0.5)
    z = lift_eval(fam, X0, 0.45)
    assert lift_inverse(fam, X0, z) == pytest.approx(0.45, abs=1e-12)
    assert lift_inverse(fam, X0, 0.47459) == pytest.approx(0.45, abs=1e-5)


@given(st.integers(0, 10_000), st.floats(-4, 4))
def test_degree_one_and_inverse(seed, y):
    r = np.random.default_rng(seed)
    fam, base = random_family(r), random_base(r)
    x = base.sample(r)
    assert lift_eval(fam, x, y + 1) - lift_eval(fam, x, y) == pytest.approx(1.0, abs=1e-12)
    assert lift_inverse(fam, x, lift_eval(fam, x, y)) == pytest.approx(y, abs=1e-10)


@given(st.integers(0, 10_000))
def test_monotone_and_derivative_bounds(seed):
    r = np.random.default_rng(seed)
    fam, base = random_family(r), random_base(r)
    t = base.sample(r).phase
    ys = np.linspace(-1, 1, 401)
    assert np.all(np.diff(fam.eval_at(t, ys)) > 0)
    d = fam.derivative_at(t, ys)
    assert np.all(d <= fam.deriv_max + 1e-12)
    assert np.all(d >= fam.deriv_min - 1e-12)


@given(st.integers(0, 10_000))
def test_lift_commutes_with_integer_shifts(seed):
    r = np.random.default_rng(seed)
    fam = random_family(r)
    ys = r.uniform(-3, 3, 20)
    for k in (-2, 1, 3):
        assert np.allclose(fam.eval_at(0.4, ys + k), fam.eval_at(0.4, ys) + k, atol=1e-12)


def test_displacement_examples():
    rig = ArnoldFamily(tau=0.3)
    assert displacement_orbit(rig, Rotation(), X0, 0.0, 100) == pytest.approx(30.0, abs=1e-11)
    assert displacement_orbit(rig, Rotation(), X0, 0.0, 100, eps=0.01) == pytest.approx(31.0, abs=1e-11)
    assert displacement_orbit(ArnoldFamily(alpha=0.5), Rotation(), X0, 0.0, 50) == 0.0


def test_displacement_matches_python_composition():
    fam = ArnoldFamily(tau=0.1, alpha=0.6, beta=0.3)
    base = Rotation()
    x, y = X0, 0.17
    for _ in range(25):
        y = lift_eval(fam, x, y)
        x = base.step(x)
    assert displacement_orbit(fam, base, X0, 0.17, 25) == pytest.approx(y - 0.17, abs=1e-11)


def test_family_guards():
    with pytest.raises(ValueError):
        ArnoldFamily(alpha=1.0)
    with pytest.raises(ValueError):
        PFamily(P=TrigPoly(0.0, (0.2,), (0.0,)))  # |P'| bound 2 pi * 0.2 > 1
    with pytest.raises(ValueError):
        PFamily(P=TrigPoly(0.3))
    with pytest.raises(ValueError):
        TrigLift(TrigPoly(), (TrigPoly(0.0, (0.0,), (0.0,)),), (TrigPoly(0.5),))


def test_trig_lift_validated_derivative():
    # coefficient sum exceeds 1 but the map is still monotone
    fam = TrigLift(TrigPoly(0.1), (TrigPoly(0.1),), (TrigPoly(0.1),))
    assert fam.deriv_min > 0
    assert fam.deriv_min <= 1 - 2 * math.pi * 0.1 * math.sqrt(2) + 1e-3


def test_base_dependence_flag():
    assert not ArnoldFamily(alpha=0.3).depends_on_base
    assert ArnoldFamily(alpha=0.3, beta=0.2).depends_on_base


def test_perturbation_vector_round_trip():
    fam = ArnoldFamily(tau=0.1, alpha=0.4, beta=0.5)
    v = fam.perturbation_vector(4)
    assert v.size == 9
    assert fam.with_perturbation_vector(v).q == TrigPoly.from_vector(v)
    lift = TrigLift(TrigPoly(0.1, (0.2,), (0.0,)), (TrigPoly(0.01),), (TrigPoly(0.02, (0.01,), (0.0,)),))
    again = lift.with_perturbation_vector(lift.perturbation_vector(2))
    assert np.array_equal(again.coef[:, :3], lift.coef[:, :3])


def test_odometer_phase_drives_forcing():
    base = Odometer((2,), 8)
    fam = ArnoldFamily(beta=0.5, q=TrigPoly(0.0, (1.0,), (0.0,)))
    x = base.point_at_phase(0.25)
    assert lift_eval(fam, x, 0.0) == pytest.approx(0.5 * math.cos(2 * math.pi * 0.25), abs=1e-12)
