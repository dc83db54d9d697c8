"""Acceptance criteria runners, shared by ``tonguelock selftest`` and the
test suite.  Each runner returns a :class:`CriterionResult`; the wall-clock
limit is part of the pass condition.
"""
from __future__ import annotations

import math
import sys
import time
import traceback
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .base import GOLDEN, Odometer, Rotation, SkewShift
from .fiber import ArnoldFamily, PFamily, TrigLift, lift_inverse
from .locking import Budget, Locked, Unlocked, classify, locked_certificate, plateau_width, unlocked_evidence
from .lyapunov import derivative_integral_check, exponent_bounds
from .probes import exponent_minimize, lock_search, reverify_budget
from .rotation import rotation_enclosure
from .trigpoly import TWO_PI, TrigPoly

ROOT_SEED = 20240611


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float
    limit: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s, limit {self.limit:g}s)"


def rng_for(stream: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(ROOT_SEED, spawn_key=(stream, index)))


def random_poly(rng, modes: int, scale: float = 1.0) -> TrigPoly:
    return TrigPoly(rng.uniform(-scale, scale), tuple(rng.uniform(-scale, scale, modes)),
                    tuple(rng.uniform(-scale, scale, modes)))


def _with_deriv_bound(p: TrigPoly, target: float) -> TrigPoly:
    return p.scaled(target / p.deriv_bound) if p.deriv_bound > 0 else p


def random_base(rng):
    pick = rng.integers(5)
    if pick == 0:
        return Rotation()
    if pick == 1:
        return Rotation((GOLDEN, math.sqrt(2) - 1))
    if pick == 2:
        return SkewShift()
    if pick == 3:
        return Odometer((2,), 32)
    return Odometer((2, 3), 16)


def random_family(rng):
    """Arnold, P-family or base-dependent trig lift, all strictly monotone."""
    pick = rng.integers(3)
    if pick == 0:
        return ArnoldFamily(tau=rng.uniform(-1, 1), alpha=rng.uniform(0, 0.95),
                            beta=rng.uniform(0, 1), q=random_poly(rng, 3))
    if pick == 1:
        P = _with_deriv_bound(random_poly(rng, 3), rng.uniform(0.1, 0.9))
        return PFamily(P=P, forcing=random_poly(rng, 3))
    k = 2
    polys = [random_poly(rng, 2) for _ in range(2 * k)]
    weight = sum(TWO_PI * (i % k + 1) * p.sup_bound for i, p in enumerate(polys))
    shrink = rng.uniform(0.1, 0.9) / weight
    polys = [p.scaled(shrink) for p in polys]
    return TrigLift(random_poly(rng, 2), tuple(polys[:k]), tuple(polys[k:]))


def _timed(number: int, name: str, limit: float, body: Callable[[], tuple[bool, str]]) -> CriterionResult:
    start = time.perf_counter()
    try:
        ok, detail = body()
    except Exception as exc:  # a crash is a failed criterion, not an aborted suite
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        traceback.print_exc()
    secs = time.perf_counter() - start
    if secs > limit:
        ok, detail = False, detail + " [over time limit]"
    return CriterionResult(number, name, ok, detail, secs, limit)


def structure_suite(families: int = 1000) -> tuple[bool, str]:
    worst_comm = worst_inv = 0.0
    non_monotone = 0
    for i in range(families):
        rng = rng_for(1, i)
        fam, base = random_family(rng), random_base(rng)
        x = base.sample(rng)
        t = x.phase
        ys = rng.uniform(-5, 5, 4)
        worst_comm = max(worst_comm, float(np.max(np.abs(fam.eval_at(t, ys + 1) - fam.eval_at(t, ys) - 1))))
        grid = np.sort(rng.uniform(-1, 2, 64))
        if np.any(np.diff(fam.eval_at(t, grid)) <= 0):
            non_monotone += 1
        for y in ys:
            z = fam.eval_at(t, y)
            worst_inv = max(worst_inv, abs(lift_inverse(fam, x, z) - y))
    ok = worst_comm <= 1e-12 and worst_inv <= 1e-10 and non_monotone == 0
    return ok, (f"{families} families, commutation err {worst_comm:.1e}, inverse err {worst_inv:.1e}, "
                f"non-monotone {non_monotone}")


def rotation_oracle() -> tuple[bool, str]:
    enc = rotation_enclosure(ArnoldFamily(tau=1 / 3), Rotation(), 10_000)
    ok = (1 / 3) in enc and enc.width < 1e-8
    return ok, f"[{enc.lo:.12f}, {enc.hi:.12f}] width {enc.width:.1e}"


def normalization_suite(families: int = 20, nodes: int = 4096) -> tuple[bool, str]:
    worst = 0.0
    for i in range(families):
        rng = rng_for(3, i)
        fam, base = random_family(rng), random_base(rng)
        n = 1 + i % 8
        val = derivative_integral_check(fam, base, base.sample(rng), n, nodes)
        worst = max(worst, abs(val - 1.0))
    return worst < 1e-6, f"{families} families, n<=8, max |integral - 1| = {worst:.1e}"


def exponent_oracle() -> tuple[bool, str]:
    est = exponent_bounds(ArnoldFamily(alpha=0.5), Rotation(), 1024)
    up, lo = math.log(1.5), math.log(0.5)
    ok = (est.upper_L_plus >= up - 1e-6 and abs(est.upper_L_plus - up) <= 0.02 * abs(up)
          and est.lower_L_minus <= lo + 1e-6 and abs(est.lower_L_minus - lo) <= 0.02 * abs(lo))
    return ok, f"upper {est.upper_L_plus:.6f} (log 1.5 = {up:.6f}), lower {est.lower_L_minus:.6f} (log 0.5 = {lo:.6f})"


def exponent_sign_suite(families: int = 50, n: int = 64, grid: int = 32) -> tuple[bool, str]:
    bad = []
    for i in range(families):
        rng = rng_for(5, i)
        fam, base = random_family(rng), random_base(rng)
        est = exponent_bounds(fam, base, n, grid, grid)
        m = est.margin
        ok = (est.lower_L_minus <= m and est.upper_L_plus >= -m
              and max(est.upper_L_plus, -est.lower_L_minus) <= math.log(fam.norm_bound) + m)
        if not ok:
            bad.append(i)
    return not bad, f"{families} families, violations {bad or 'none'}"


def lock_oracle() -> tuple[bool, str]:
    parts, ok = [], True
    for alpha in (0.2, 0.5, 0.8):
        cls = classify(ArnoldFamily(alpha=alpha), Rotation())
        good = isinstance(cls, Locked) and cls.delta >= 1e-3
        ok &= good
        parts.append(f"a={alpha}: {cls.code} delta={getattr(cls, 'delta', float('nan')):.3g}")
    cls = classify(ArnoldFamily(tau=0.3), Rotation())
    ok &= isinstance(cls, Unlocked)
    parts.append(f"tau=0.3,a=0: {cls.code}")
    return ok, "; ".join(parts)


def tongue_width_suite() -> tuple[bool, str]:
    parts, ok = [], True
    for alpha in (0.2, 0.5, 0.8):
        w = plateau_width(lambda t, a=alpha: ArnoldFamily(tau=t, alpha=a), 0.0)
        rel = abs(w - alpha / math.pi) / (alpha / math.pi)
        ok &= rel <= 0.05
        parts.append(f"a={alpha}: {w:.5f} vs {alpha / math.pi:.5f} ({100 * rel:.2f}%)")
    return ok, "; ".join(parts)


def persistence_suite(samples: int = 20, eps: float = 0.02, n: int = 512,
                      max_draws: int = 200) -> tuple[bool, str]:
    found = draws = 0
    failures = []
    base = Rotation()
    while found < samples and draws < max_draws:
        rng = rng_for(8, draws)
        draws += 1
        fam = ArnoldFamily(tau=rng.uniform(0.15, 0.85), alpha=rng.uniform(0.0, 0.6),
                           beta=rng.uniform(0.0, 0.2), q=random_poly(rng, 2))
        signed = eps if rng.random() < 0.5 else -eps
        gap, margin = unlocked_evidence(fam, base, signed, n)
        if gap is None:
            continue
        found += 1
        gap2, _ = unlocked_evidence(fam, base, signed, 2 * n)
        if gap2 is None or gap - gap2 > 2 * margin / n:
            failures.append(draws - 1)
    ok = found == samples and not failures
    return ok, f"{found} unlocked samples from {draws} draws, persistence failures {failures or 'none'}"


def scan_suite(workers: int = 2) -> tuple[bool, str]:
    from .scan import ScanConfig, metadata_json, row_boundary, to_csv, to_pgm, tongue_scan
    cfg = ScanConfig()
    one = tongue_scan(cfg)
    many = tongue_scan(replace(cfg, workers=max(2, workers)))
    same = all(f(one) == f(many) for f in (to_csv, to_pgm, metadata_json))
    cell = (cfg.tau_range[1] - cfg.tau_range[0]) / (cfg.tau_count - 1)
    off_rows = []
    for a, alpha in enumerate(cfg.alphas):
        last_l, first_u = row_boundary(one, a)
        edge = alpha / TWO_PI
        if (last_l is None or first_u is None or last_l > first_u
                or abs(last_l - edge) > cell or abs(first_u - edge) > cell):
            off_rows.append(a)
    stale = 0
    for w, (a, t) in zip(one.witnesses, np.ndindex(one.shape)):
        if isinstance(w, Locked):
            fam = cfg.family(cfg.taus[t], cfg.alphas[a])
            if locked_certificate(fam, cfg.base, w.strip, w.delta, w.steps) is None:
                stale += 1
    ok = same and not off_rows and stale == 0
    return ok, (f"byte-identical 1 vs {max(2, workers)} workers: {same}; rows off boundary "
                f"{off_rows or 'none'} of {cfg.alpha_count}; stale witnesses {stale}")


def probe_suite() -> tuple[bool, str]:
    base = Rotation()
    q0 = TrigPoly(0.0, (1.0,), (0.0,))
    parts, ok = [], True
    for tau, beta, radius, trials in ((0.05, 0.1, 0.2, 4), (0.085, 0.1, 0.3, 4)):
        rep = lock_search(base, tau, 0.5, beta, q0, radius, trials, seed=ROOT_SEED, modes=2,
                          exhaustive=True)
        if rep.found is not None:
            again = classify(ArnoldFamily(tau=tau, alpha=0.5, beta=beta, q=rep.found), base,
                             reverify_budget(Budget()))
            ok &= isinstance(again, Locked)
        parts.append(f"lock tau={tau}: rate {rep.success_rate:.2f} ({rep.reverified}/{rep.trials_run})")
    fam0 = ArnoldFamily(tau=0.4, alpha=0.8, beta=0.1)
    rep = exponent_minimize(base, fam0, 0.02, 10, seed=ROOT_SEED, modes=2)
    objs = [rep.initial.objective] + rep.objectives
    monotone = all(b < a for a, b in zip(objs, objs[1:]))
    unlocked = all(isinstance(classify(f, base), Unlocked) for f in rep.accepted)
    ok &= monotone and unlocked
    parts.append(f"descent: {len(rep.trace)}/{rep.proposals} accepted, objective "
                 f"{objs[0]:.4f} -> {objs[-1]:.4f}, monotone {monotone}, unlocked {unlocked}")
    return ok, "; ".join(parts)


CRITERIA = [
    (1, "structure suite", 10, structure_suite),
    (2, "rotation oracle", 1, rotation_oracle),
    (3, "derivative normalization", 30, normalization_suite),
    (4, "exponent oracle", 60, exponent_oracle),
    (5, "exponent sign bounds", 120, exponent_sign_suite),
    (6, "lock certificate oracle", 60, lock_oracle),
    (7, "tongue width", 300, tongue_width_suite),
    (8, "unlocked persistence", 120, persistence_suite),
    (9, "scan determinism and boundary", 600, scan_suite),
    (10, "probe soundness", 600, probe_suite),
]


def run_criterion(number: int, workers: int = 2) -> CriterionResult:
    num, name, limit, fn = CRITERIA[number - 1]
    body = (lambda: fn(workers)) if num == 9 else fn
    return _timed(num, name, limit, body)


def run_all(workers: int = 2, stream=sys.stdout) -> list[CriterionResult]:
    results = []
    for num, *_ in CRITERIA:
        res = run_criterion(num, workers)
        print(res.line(), file=stream, flush=True)
        results.append(res)
    return results
