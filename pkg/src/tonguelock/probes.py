"""Seeded perturbation probes: search for a locking forcing term, and local
descent on the extremal exponents inside the unlocked region.

Random streams are split by counter: trial ``i`` of probe kind ``k`` draws
from ``SeedSequence(seed, spawn_key=(k, i))``, so the draws never depend on
evaluation order.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .base import BaseMap
from .fiber import ArnoldFamily, FiberFamily
from .locking import Budget, Locked, Unlocked, classify
from .lyapunov import ExponentEstimate, exponent_bounds
from .trigpoly import TrigPoly

log = logging.getLogger(__name__)

DEFAULT_MODES = 8
LOCK_STREAM = 0
DESCENT_STREAM = 1
# below this the grid exponents are zero up to rounding (rigid fibers)
ZERO_OBJECTIVE = 1e-12


def trial_rng(seed: int, kind: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(kind, index)))


def reverify_budget(budget: Budget) -> Budget:
    """Independent re-run: finer strip nodes, longer transient, and the two
    shortest unlocked horizons as a cross-check against a contradicting gap."""
    return replace(budget, x_nodes=2 * budget.x_nodes, transient=2 * budget.transient,
                   n_list=tuple(budget.n_list[:2]), cross_check=True)


@dataclass
class LockSearchReport:
    found: Optional[TrigPoly]
    found_trial: Optional[int]
    trials_run: int
    tallies: dict = field(default_factory=lambda: {"L": 0, "U+": 0, "U-": 0, "?": 0})
    reverified: int = 0
    reverify_failures: list = field(default_factory=list)
    near_misses: list = field(default_factory=list)
    witness: Optional[Locked] = None

    @property
    def success_rate(self) -> float:
        return self.reverified / self.trials_run if self.trials_run else 0.0

    def to_dict(self) -> dict:
        return {
            "found": self.found.format() if self.found is not None else None,
            "found_trial": self.found_trial,
            "trials_run": self.trials_run,
            "tallies": dict(self.tallies),
            "reverified": self.reverified,
            "reverify_failures": list(self.reverify_failures),
            "near_misses": list(self.near_misses),
            "success_rate": self.success_rate,
            "witness": self.witness.summary() if self.witness is not None else None,
        }


def lock_search(base: BaseMap, tau: float, alpha: float, beta: float, q0: TrigPoly,
                radius: float, trials: int, seed: int = 0, budget: Budget = Budget(),
                modes: int = DEFAULT_MODES, exhaustive: bool = False) -> LockSearchReport:
    """Sample ``q0 + v`` with ``v`` uniform in the ``radius`` cube on modes
    ``0..modes`` and report the lowest trial whose map is Locked on two
    independent classify runs.  Trial 0 is ``v = 0``.

    With ``exhaustive`` every trial is run so the success rate covers the
    whole sample; otherwise the search stops at the first re-verified hit.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"lock_search needs alpha in (0, 1), got {alpha}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if radius <= 0:
        raise ValueError("radius must be positive")
    width = max(modes, q0.modes)
    v0 = q0.padded(width)
    fresh = reverify_budget(budget)
    report = LockSearchReport(None, None, 0)
    for i in range(trials):
        v = v0.copy()
        if i > 0:
            v += trial_rng(seed, LOCK_STREAM, i).uniform(-radius, radius, v.size)
        q = q0 if i == 0 else TrigPoly.from_vector(v)
        fam = ArnoldFamily(tau=tau, alpha=alpha, beta=beta, q=q)
        cls = classify(fam, base, budget)
        report.trials_run += 1
        report.tallies[cls.code] += 1
        if cls.code == "?":
            report.near_misses.append({"trial": i, "diagnostics": cls.summary()[:200]})
            continue
        if not isinstance(cls, Locked):
            continue
        again = classify(fam, base, fresh)
        if not isinstance(again, Locked):
            report.reverify_failures.append({"trial": i, "recheck": again.summary()[:200]})
            continue
        report.reverified += 1
        if report.found is None:
            report.found, report.found_trial, report.witness = q, i, again
            if not exhaustive:
                break
    return report


@dataclass
class DescentReport:
    family: FiberFamily
    initial: ExponentEstimate
    trace: list = field(default_factory=list)
    accepted: list = field(default_factory=list)
    proposals: int = 0
    rejected_locked: int = 0
    rejected_invalid: int = 0

    @property
    def objectives(self) -> list[float]:
        return [e.objective for e in self.trace]

    def to_dict(self) -> dict:
        return {
            "initial_objective": self.initial.objective,
            "initial_margin": self.initial.margin,
            "trace": [{"objective": e.objective, "upper_L_plus": e.upper_L_plus,
                       "lower_L_minus": e.lower_L_minus, "margin": e.margin} for e in self.trace],
            "accepted": len(self.trace),
            "proposals": self.proposals,
            "rejected_not_unlocked": self.rejected_locked,
            "rejected_invalid": self.rejected_invalid,
            "final_vector": [float(c) for c in self.family.perturbation_vector(DEFAULT_MODES)],
        }


def exponent_minimize(base: BaseMap, fam0: FiberFamily, radius: float, iterations: int,
                      seed: int = 0, grid_x: int = 32, grid_y: int = 32, n: int = 256,
                      budget: Budget = Budget(), modes: int = DEFAULT_MODES) -> DescentReport:
    """Seeded hill descent on the grid exponent objective ``max(L_+, -L_-)``.

    A proposal is accepted only if it strictly lowers the objective and the
    new map still classifies Unlocked.  Proposals whose coefficients leave
    the diffeomorphism class are skipped.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    start = classify(fam0, base, budget)
    if not isinstance(start, Unlocked):
        raise ValueError(f"exponent_minimize needs an unlocked start, got {start.label}")
    est = exponent_bounds(fam0, base, n, grid_x, grid_y)
    report = DescentReport(fam0, est)
    if est.objective <= ZERO_OBJECTIVE:
        return report
    current, best = fam0, est
    v_cur = fam0.perturbation_vector(modes)
    for i in range(iterations):
        step = trial_rng(seed, DESCENT_STREAM, i).uniform(-radius, radius, v_cur.size)
        report.proposals += 1
        try:
            cand = current.with_perturbation_vector(v_cur + step)
        except ValueError:
            report.rejected_invalid += 1
            continue
        cand_est = exponent_bounds(cand, base, n, grid_x, grid_y)
        if not cand_est.objective < best.objective:
            continue
        if not isinstance(classify(cand, base, budget), Unlocked):
            report.rejected_locked += 1
            continue
        current, best, v_cur = cand, cand_est, v_cur + step
        report.trace.append(cand_est)
        report.accepted.append(cand)
        log.debug("descent step %d objective %.6g", i, cand_est.objective)
    report.family = current
    return report
