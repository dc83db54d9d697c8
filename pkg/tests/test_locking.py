import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tonguelock.base import Odometer, Rotation
from tonguelock.fiber import ArnoldFamily
from tonguelock.locking import (Budget, Locked, Strip, Undecided, Unlocked, UnlockedUp, classify,
                                find_candidate_strip, locked_certificate, plateau_width,
                                unlocked_certificate, unlocked_evidence)

BASE = Rotation()
FAST = Budget(n_list=(512,), eps_list=(0.02,), grid_x=16, grid_y=16)


def flat_strip(center, radius, nodes=64):
    return Strip(np.full(nodes, center), np.full(nodes, radius))


def test_rigid_unlocked_gap():
    gap = unlocked_certificate(ArnoldFamily(tau=0.3), BASE, 0.01, 1000)
    assert gap == pytest.approx(0.01, abs=1e-9)
    gap_down = unlocked_certificate(ArnoldFamily(tau=0.3), BASE, -0.01, 1000)
    assert gap_down == pytest.approx(0.01, abs=1e-9)


def test_locked_map_has_no_gap():
    assert unlocked_certificate(ArnoldFamily(alpha=0.5), BASE, 0.001, 1000) is None


@pytest.mark.parametrize("tau", [0.2, 0.3])
def test_gap_monotone_in_eps(tau):
    fam = ArnoldFamily(tau=tau, alpha=0.3, beta=0.05)
    small = unlocked_certificate(fam, BASE, 0.01, 1024, 32, 32)
    assert small is not None
    big = unlocked_certificate(fam, BASE, 0.02, 1024, 32, 32)
    assert big is not None and big >= small - 1e-12


def test_unlocked_persists_at_double_horizon():
    fam = ArnoldFamily(tau=0.3, alpha=0.4, beta=0.1)
    gap, margin = unlocked_evidence(fam, BASE, 0.02, 512)
    gap2, _ = unlocked_evidence(fam, BASE, 0.02, 1024)
    assert gap is not None and gap2 is not None
    assert gap - gap2 <= 2 * margin / 512


def test_unlocked_argument_guards():
    with pytest.raises(ValueError):
        unlocked_certificate(ArnoldFamily(), BASE, 0.0, 100)


def test_spec_strip_example_locks():
    fam = ArnoldFamily(alpha=0.5)
    cert = locked_certificate(fam, BASE, flat_strip(0.5, 0.05), 0.01)
    assert isinstance(cert, Locked)
    # fiber image of the closed strip is [f(0.45), f(0.55)]
    assert fam.eval_at(0.0, 0.45) == pytest.approx(0.47459, abs=1e-5)
    assert fam.eval_at(0.0, 0.55) == pytest.approx(0.52541, abs=1e-5)


def test_rigid_rotation_never_locks():
    fam = ArnoldFamily(tau=0.25)
    for r in (0.4, 0.2, 0.05):
        assert locked_certificate(fam, BASE, flat_strip(0.5, r), 1e-4) is None


def test_certificate_needs_positive_delta():
    with pytest.raises(ValueError):
        locked_certificate(ArnoldFamily(alpha=0.5), BASE, flat_strip(0.5, 0.05), 0.0)


def test_strip_needs_circle_rotation():
    with pytest.raises(ValueError):
        locked_certificate(ArnoldFamily(alpha=0.5), Odometer((2,), 8), flat_strip(0.5, 0.05), 0.01)


def test_strip_validation():
    with pytest.raises(ValueError):
        flat_strip(0.5, 0.5)
    with pytest.raises(ValueError):
        Strip(np.array([0.0, 0.3, 0.0, 0.3]), 0.1)


def test_strip_interpolation_across_seam():
    s = Strip(np.linspace(0, 0.875, 8), 0.1)  # winds once across the seam
    assert s.wind == 1
    c, r = s.at(np.array([0.9375]))
    assert c[0] == pytest.approx(0.9375)
    assert r[0] == pytest.approx(0.1)


def test_candidate_strip_examples():
    fam = ArnoldFamily(alpha=0.5)
    s = find_candidate_strip(fam, BASE, transient=512, x_nodes=64)
    assert np.allclose(s.center % 1.0, 0.5, atol=1e-9)
    drift = find_candidate_strip(ArnoldFamily(tau=0.25), BASE, transient=3, x_nodes=16)
    assert drift.nodes == 16
    zero = find_candidate_strip(fam, BASE, transient=0, x_nodes=16, radius0=0.1)
    assert np.all(zero.center == 0.5) and np.all(zero.radius == 0.1)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
def test_classify_locked_oracle(alpha):
    cls = classify(ArnoldFamily(alpha=alpha), BASE)
    assert isinstance(cls, Locked)
    assert cls.delta >= 1e-3
    assert cls.summary().startswith("LOCKED delta=")


def test_locked_witness_robust_at_half_delta():
    cls = classify(ArnoldFamily(alpha=0.5, beta=0.1), BASE)
    assert isinstance(cls, Locked)
    assert locked_certificate(ArnoldFamily(alpha=0.5, beta=0.1), BASE, cls.strip, cls.delta / 2) is not None


def test_classify_rigid_records_both_directions():
    cls = classify(ArnoldFamily(tau=0.3), BASE)
    assert isinstance(cls, UnlockedUp)
    assert "UNLOCKED_UP" in cls.notes and "UNLOCKED_DOWN" in cls.notes


def test_classify_strong_forcing_tight_budget_undecided():
    tight = Budget(n_list=(64,), eps_list=(0.001,), grid_x=4, grid_y=4, radii=(0.01,), transient=4)
    cls = classify(ArnoldFamily(tau=0.1, alpha=0.05, beta=1.0), BASE, tight)
    assert isinstance(cls, Undecided)


def test_classify_on_odometer_skips_strip():
    cls = classify(ArnoldFamily(tau=0.3), Odometer((2,), 16), FAST)
    assert isinstance(cls, Unlocked)


@settings(max_examples=8)
@given(st.floats(0.0, 0.45), st.floats(0.05, 0.9))
def test_cross_check_mutual_exclusion(tau, alpha):
    budget = Budget(n_list=(512,), eps_list=(0.02, 0.005), grid_x=32, grid_y=32, cross_check=True)
    cls = classify(ArnoldFamily(tau=tau, alpha=alpha), BASE, budget)
    assert "inconsistent" not in getattr(cls, "diagnostics", "")


def test_gap_wider_than_plateau_is_not_a_clash():
    # half-width alpha / 2 pi = 0.0199 < eps = 0.02, so both certificates are true
    budget = Budget(n_list=(512,), eps_list=(0.02,), cross_check=True)
    cls = classify(ArnoldFamily(alpha=0.125), BASE, budget)
    assert isinstance(cls, Locked)
    assert cls.delta < 0.02


@settings(max_examples=8)
@given(st.floats(0.0, 0.5), st.floats(0.05, 0.9))
def test_verdicts_agree_with_tongue_formula(tau, alpha):
    edge = alpha / (2 * np.pi)
    cls = classify(ArnoldFamily(tau=tau, alpha=alpha), BASE, FAST)
    if isinstance(cls, Locked):
        # a locked map at rotation 0 or on a higher tongue; rotation 0 needs tau <= edge
        if tau > edge:
            from tonguelock.rotation import rho_orbit_estimate
            assert abs(rho_orbit_estimate(ArnoldFamily(tau=tau, alpha=alpha), BASE, BASE.origin(), 0.0, 4096)) > 1e-3
    elif isinstance(cls, Unlocked):
        assert tau > edge


def test_plateau_width_examples():
    w2 = plateau_width(lambda t: ArnoldFamily(tau=t, alpha=0.2), 0.0)
    w5 = plateau_width(lambda t: ArnoldFamily(tau=t, alpha=0.5), 0.0)
    assert w2 == pytest.approx(0.06366, rel=0.05)
    assert w5 == pytest.approx(0.15915, rel=0.05)
    assert w5 >= w2


def test_plateau_needs_locked_start():
    with pytest.raises(ValueError):
        plateau_width(lambda t: ArnoldFamily(tau=t), 0.3)
