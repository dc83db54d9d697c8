import numpy as np
import pytest

from tonguelock import kernels
from tonguelock.acceptance import random_family, rng_for
from tonguelock.base import Odometer, Rotation, SkewShift
from tonguelock.fiber import ArnoldFamily
from tonguelock.rotation import product_grid

BACKENDS = kernels.available_backends()


def _run(fam, base, impl, n=200, eps=0.0, gx=6, gy=6):
    c, d, y = product_grid(fam, base, gx, gy)
    return kernels.orbit_sums(base.kind, base.kernel_params(), base.kernel_radices(d.shape[1]),
                              c, d, y, n, eps, fam.coef, True, impl=impl)


def test_backend_flag_is_consistent():
    assert kernels.BACKEND in BACKENDS


@pytest.mark.skipif("cython" not in BACKENDS, reason="extension not built")
@pytest.mark.parametrize("index", range(6))
@pytest.mark.parametrize("base", [Rotation(), Rotation((0.618, 0.414)), SkewShift(), Odometer((2, 3), 12)],
                         ids=["rot1", "rot2", "skew", "odo"])
def test_backends_agree(index, base):
    fam = random_family(rng_for(77, index))
    d_np, l_np = _run(fam, base, BACKENDS["numpy"], eps=0.003)
    d_cy, l_cy = _run(fam, base, BACKENDS["cython"], eps=0.003)
    assert np.allclose(d_np, d_cy, atol=1e-8)
    assert np.allclose(l_np, l_cy, atol=1e-7)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_rigid_rotation_exact(name):
    fam = ArnoldFamily(tau=0.25)
    disp, logd = _run(fam, Rotation(), BACKENDS[name], n=40)
    assert np.allclose(disp, 10.0, atol=1e-12, rtol=0)
    assert np.all(logd == 0.0)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_odometer_carry_in_kernel(name):
    # coefficient depends on the phase, so base stepping must match the Python map
    from tonguelock.fiber import PFamily, point_orbits
    from tonguelock.trigpoly import TrigPoly
    base = Odometer((2,), 5)
    fam = PFamily(P=TrigPoly(0.0, (0.0,), (0.05,)), forcing=TrigPoly(0.0, (0.3,), (0.1,)))
    p = base.origin()
    y = 0.2
    for _ in range(40):
        y = fam.eval_at(p.phase, y)
        p = base.step(p)
    c, d = base.kernel_state([base.origin()])
    disp, _ = kernels.orbit_sums(base.kind, base.kernel_params(), base.kernel_radices(5),
                                 c, d, np.array([0.2]), 40, 0.0, fam.coef, False, impl=BACKENDS[name])
    assert disp[0] == pytest.approx(y - 0.2, abs=1e-12)
