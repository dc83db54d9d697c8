"""Compiled vs numpy orbit kernel on the workloads the certificates run.

    python benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import time

from tonguelock import kernels
from tonguelock.base import Odometer, Rotation
from tonguelock.fiber import ArnoldFamily, TrigLift
from tonguelock.rotation import product_grid
from tonguelock.trigpoly import TrigPoly

CASES = [
    ("rigid, 64x64 grid, n=4096", ArnoldFamily(tau=1 / 3), Rotation(), 64, 64, 4096),
    ("arnold, 64x64 grid, n=8192", ArnoldFamily(tau=0.1, alpha=0.5), Rotation(), 64, 64, 8192),
    ("forced arnold, 64x64, n=2048", ArnoldFamily(tau=0.1, alpha=0.5, beta=0.2), Rotation(), 64, 64, 2048),
    ("trig lift on odometer, 32x32, n=1024",
     TrigLift(TrigPoly(0.1, (0.05,), (0.0,)), (TrigPoly(0.02, (0.01,), (0.0,)),), (TrigPoly(0.03),)),
     Odometer((2,), 32), 32, 32, 1024),
]


def time_case(impl, fam, base, gx, gy, n, repeat):
    c, d, y = product_grid(fam, base, gx, gy)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        kernels.orbit_sums(base.kind, base.kernel_params(), base.kernel_radices(d.shape[1]),
                           c, d, y, n, 0.0, fam.coef, True, impl=impl)
        best = min(best, time.perf_counter() - t0)
    return best, y.size * n


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the numpy kernel is available")
    print(f"{'case':40s} " + " ".join(f"{b:>14s}" for b in backends) + "   speedup")
    for name, fam, base, gx, gy, n in CASES:
        times = {b: time_case(fn, fam, base, gx, gy, n, args.repeat) for b, fn in backends.items()}
        cells = " ".join(f"{t * 1e3:11.1f} ms" for t, _ in times.values())
        ratio = ""
        if "cython" in times:
            ratio = f"{times['numpy'][0] / times['cython'][0]:8.1f}x"
        print(f"{name:40s} {cells} {ratio}")


if __name__ == "__main__":
    main()
