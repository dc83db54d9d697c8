"""Mode-locking certificates.

Two independent witnesses:

* **unlocked** - a strict gap between the certified displacement brackets
  of ``F`` and ``F + eps`` proves ``rho(F + eps) != rho(F)``;
* **locked** - an open strip whose closure is mapped strictly inside
  itself by every ``F + eps`` with ``|eps| <= delta`` pins the rotation
  number over that shift range.

Strip checks work on circle rotations only: strips are graphs over a
uniform node grid on T, linearly interpolated between nodes.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .base import BaseMap, Rotation
from .fiber import FiberFamily, grid_orbits, growth_sum, safe_pow
from .rotation import FLAG_RATIO, DisplacementStats, side_bound

log = logging.getLogger(__name__)

PLATEAU_RESOLUTION = 1e-4


@dataclass(frozen=True, eq=False)
class Strip:
    """Fiber intervals ``(center - radius, center + radius)`` at nodes ``j / N``.

    ``center`` holds lift values; across the seam the graph continues as
    ``center[0] + wind``.
    """

    center: np.ndarray
    radius: np.ndarray

    def __post_init__(self):
        c = np.array(self.center, dtype=float)
        r = np.broadcast_to(np.asarray(self.radius, dtype=float), c.shape).copy()
        if c.ndim != 1 or c.size < 2:
            raise ValueError("strip needs at least two nodes")
        if not (np.all(r > 0.0) and np.all(r < 0.5)):
            raise ValueError("strip radii must lie in (0, 0.5)")
        c.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)
        if max(np.abs(self._steps(c, self.wind)).max(), np.abs(self._steps(r, 0)).max()) >= 0.25:
            raise ValueError("strip fails the continuity guard (adjacent change >= 0.25)")

    @staticmethod
    def _steps(v, wrap):
        return np.diff(np.append(v, v[0] + wrap))

    @property
    def nodes(self) -> int:
        return self.center.size

    @property
    def x_grid(self) -> np.ndarray:
        return np.arange(self.nodes) / self.nodes

    @property
    def wind(self) -> int:
        return int(round(self.center[-1] - self.center[0]))

    @property
    def slope_center(self) -> float:
        return float(np.abs(self._steps(self.center, self.wind)).max() * self.nodes)

    @property
    def slope_radius(self) -> float:
        return float(np.abs(self._steps(self.radius, 0)).max() * self.nodes)

    def at(self, x):
        """Interpolated ``(center, radius)`` at base points ``x``."""
        x = np.asarray(x, dtype=float) % 1.0
        pos = x * self.nodes
        j = np.minimum(np.floor(pos).astype(int), self.nodes - 1)
        s = pos - j
        c_ext = np.append(self.center, self.center[0] + self.wind)
        r_ext = np.append(self.radius, self.radius[0])
        return ((1 - s) * c_ext[j] + s * c_ext[j + 1], (1 - s) * r_ext[j] + s * r_ext[j + 1])


@dataclass(frozen=True)
class StripCheck:
    min_slack: float
    budget: float
    worst_node: int
    worst_eps: float

    @property
    def ok(self) -> bool:
        return self.min_slack > self.budget


@dataclass(frozen=True, eq=False)
class Locked:
    delta: float
    strip: Strip
    steps: int
    notes: str = ""
    code = "L"
    label = "LOCKED"

    def summary(self) -> str:
        return (f"LOCKED delta={self.delta:.6g} steps={self.steps} nodes={self.strip.nodes} "
                f"radius={float(self.strip.radius.max()):.6g}")


@dataclass(frozen=True)
class Unlocked:
    """Common shape of the two unlocked witnesses."""

    eps: float
    n: int
    gap_per_step: float
    notes: str = ""

    def summary(self) -> str:
        return f"{self.label} eps={self.eps:.6g} n={self.n} gap_per_step={self.gap_per_step:.6g}"


@dataclass(frozen=True)
class UnlockedUp(Unlocked):
    code = "U+"
    label = "UNLOCKED_UP"


@dataclass(frozen=True)
class UnlockedDown(Unlocked):
    code = "U-"
    label = "UNLOCKED_DOWN"


@dataclass(frozen=True)
class Undecided:
    diagnostics: str = ""
    code = "?"
    label = "UNDECIDED"

    def summary(self) -> str:
        return f"UNDECIDED {self.diagnostics}"


LockClassification = Union[Locked, UnlockedUp, UnlockedDown, Undecided]


@dataclass(frozen=True)
class Budget:
    """Search budget shared by :func:`classify` and the scans."""

    n_list: tuple[int, ...] = (512, 2048, 8192)
    eps_list: tuple[float, ...] = (0.02, 0.01, 0.005, 0.002)
    grid_x: int = 64
    grid_y: int = 64
    transient: int = 512
    x_nodes: int = 256
    radii: tuple[float, ...] = (0.2, 0.1, 0.05, 0.02, 0.01)
    steps: int = 1
    cross_check: bool = False

    def __post_init__(self):
        if not self.n_list or not self.eps_list or not self.radii:
            raise ValueError("budget lists must be nonempty")


def _require_circle_rotation(base: BaseMap):
    if not base.is_circle_rotation:
        raise ValueError("strip certificates need a rotation of the circle as base")


def _circle_push(base: Rotation, x: np.ndarray, steps: int) -> np.ndarray:
    for _ in range(steps):
        x = (x + base.omega[0]) % 1.0
    return x


def check_strip(fam: FiberFamily, base: BaseMap, strip: Strip, delta: float,
                steps: int = 1) -> StripCheck:
    """Worst slack of ``F_eps^steps`` (eps = +/-delta) mapping closed fibers of the
    strip into the open fibers over the image base point, and the
    interpolation error budget the slack must beat."""
    _require_circle_rotation(base)
    xg = strip.x_grid
    lo_end = strip.center - strip.radius
    hi_end = strip.center + strip.radius
    coords = np.concatenate([xg, xg])[:, None]
    digits = np.zeros((coords.shape[0], 1), dtype=np.int64)
    ys = np.concatenate([lo_end, hi_end])
    tc, tr = strip.at(_circle_push(base, xg, steps))
    worst = (np.inf, -1, 0.0)
    for eps in sorted({-delta, delta}):
        disp, _ = grid_orbits(fam, base, coords, digits, ys, steps, eps)
        a = lo_end + disp[: xg.size]
        b = hi_end + disp[xg.size:]
        m = np.round(tc - 0.5 * (a + b))
        slack = np.minimum(tc + tr - (b + m), (a + m) - (tc - tr))
        j = int(np.argmin(slack))
        if slack[j] < worst[0]:
            worst = (float(slack[j]), j, eps)
    sc, sr = strip.slope_center, strip.slope_radius
    lip_image = fam.base_lipschitz * growth_sum(fam.deriv_max, steps) + safe_pow(fam.deriv_max, steps) * (sc + sr)
    budget = 0.5 / strip.nodes * (lip_image + sc + sr)
    budget += 1e-12 * (1.0 + float(np.abs(strip.center).max()) + steps * fam.disp_bound)
    return StripCheck(worst[0], float(budget), worst[1], worst[2])


def locked_certificate(fam: FiberFamily, base: BaseMap, strip: Strip, delta: float,
                       steps: int = 1) -> Optional[Locked]:
    if not delta > 0.0:
        raise ValueError("delta must be positive")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    chk = check_strip(fam, base, strip, delta, steps)
    if chk.ok:
        return Locked(float(delta), strip, steps)
    log.debug("strip check failed at node %d (eps=%g): slack %.3g <= budget %.3g",
              chk.worst_node, chk.worst_eps, chk.min_slack, chk.budget)
    return None


def _candidate_center(fam: FiberFamily, base: BaseMap, transient: int, x_nodes: int) -> np.ndarray:
    _require_circle_rotation(base)
    xg = np.arange(x_nodes) / x_nodes
    shift = int(round(base.omega[0] * x_nodes)) % x_nodes
    c = np.full(x_nodes, 0.5)
    for _ in range(transient):
        c = np.roll(fam.eval_at(xg, c), shift) % 1.0
    c = np.unwrap(c, period=1.0)
    return c - np.floor(c[0])


def find_candidate_strip(fam: FiberFamily, base: BaseMap, transient: int = 512,
                         x_nodes: int = 256, radius0: float = 0.2) -> Strip:
    """Push the graph ``w = 0.5`` forward ``transient`` times (nearest-node
    resampling) and wrap it in a uniform-radius strip.  A candidate only."""
    if not 0.0 < radius0 < 0.5:
        raise ValueError("radius0 must lie in (0, 0.5)")
    return Strip(_candidate_center(fam, base, transient, x_nodes), np.full(x_nodes, radius0))


def unlocked_gap(stats0: DisplacementStats, stats_eps: DisplacementStats, eps: float) -> Optional[float]:
    """Per-step gap certified between the brackets of ``F`` and ``F + eps``."""
    if stats0.flagged or stats_eps.flagged:
        return None
    if eps > 0:
        gap = stats_eps.lo_bound - stats0.hi_bound
    else:
        gap = stats0.lo_bound - stats_eps.hi_bound
    return gap / stats0.n if gap > 0 else None


class _Brackets:
    """Memoized one-sided displacement bounds for one family and grid."""

    def __init__(self, fam, base, grid_x, grid_y):
        self.args = (fam, base)
        self.grid = (grid_x, grid_y)
        self.cache = {}

    def __call__(self, n, eps, side):
        key = (n, eps, side)
        if key not in self.cache:
            self.cache[key] = side_bound(*self.args, n, *self.grid, eps, side)
        return self.cache[key]

    def gap(self, n, eps) -> tuple[Optional[float], str]:
        """Certified per-step gap for ``F + eps`` against ``F`` (sign of eps picks the side)."""
        side = 1 if eps > 0 else -1
        ref, ref_margin = self(n, 0.0, side)
        shifted, sh_margin = self(n, eps, -side)
        if max(ref_margin, sh_margin) / n > FLAG_RATIO:
            return None, f"n={n}:margin-flagged"
        gap = side * (shifted - ref)
        return (gap / n if gap > 0 else None), ""


def unlocked_evidence(fam: FiberFamily, base: BaseMap, eps: float, n: int,
                      grid_x: int = 64, grid_y: int = 64) -> tuple[Optional[float], float]:
    """``(gap_per_step or None, margin)`` where ``margin`` is the larger of the
    two one-sided margins the gap was built from."""
    if eps == 0:
        raise ValueError("eps must be nonzero")
    br = _Brackets(fam, base, grid_x, grid_y)
    gap, _ = br.gap(n, eps)
    side = 1 if eps > 0 else -1
    return gap, max(br(n, 0.0, side)[1], br(n, eps, -side)[1])


def unlocked_certificate(fam: FiberFamily, base: BaseMap, eps: float, n: int,
                         grid_x: int = 64, grid_y: int = 64) -> Optional[float]:
    """Per-step gap proving ``rho(F + eps) > rho(F)`` (eps > 0) or ``<`` (eps < 0)."""
    if eps == 0:
        raise ValueError("eps must be nonzero")
    if n < 2:
        raise ValueError("n must be >= 2")
    gap, note = _Brackets(fam, base, grid_x, grid_y).gap(n, eps)
    if note:
        log.debug(note)
    return gap


def _try_locked(fam, base, budget: Budget) -> tuple[Optional[Locked], str]:
    try:
        center = _candidate_center(fam, base, budget.transient, budget.x_nodes)
    except ValueError as exc:
        return None, f"no candidate strip: {exc}"
    notes = []
    spread = growth_sum(fam.deriv_max, budget.steps)
    for radius in budget.radii:
        try:
            strip = Strip(center, np.full(center.size, radius))
        except ValueError as exc:
            return None, f"candidate strip invalid: {exc}"
        chk = check_strip(fam, base, strip, 0.0, budget.steps)
        room = (chk.min_slack - chk.budget) / spread
        notes.append(f"r={radius:g}:slack={chk.min_slack:.3g}/budget={chk.budget:.3g}")
        if room > 0:
            cert = locked_certificate(fam, base, strip, 0.5 * room, budget.steps)
            if cert is not None:
                return cert, " ".join(notes)
    return None, "strip " + " ".join(notes)


def _unlocked_ladder(fam, base, budget: Budget, stop_at_first: bool = True):
    brackets = _Brackets(fam, base, budget.grid_x, budget.grid_y)
    hits = []
    notes = []
    for n in budget.n_list:
        for eps in budget.eps_list:
            for signed in (eps, -eps):
                gap, note = brackets.gap(n, signed)
                if note and note not in notes:
                    notes.append(note)
                if gap is not None:
                    cls = UnlockedUp if signed > 0 else UnlockedDown
                    hits.append(cls(signed, n, gap))
            if hits and stop_at_first:
                return hits, notes
    return hits, notes


def classify(fam: FiberFamily, base: BaseMap, budget: Budget = Budget(), *,
             search_unlocked: bool = True) -> LockClassification:
    """Locked certificate first, then the unlocked ladder over ``n_list x eps_list``."""
    locked, lnote = (None, "strip unsupported on this base")
    if base.is_circle_rotation:
        locked, lnote = _try_locked(fam, base, budget)
    if locked is not None and not budget.cross_check:
        return locked
    if not search_unlocked:
        return locked if locked is not None else Undecided(lnote)
    hits, unotes = _unlocked_ladder(fam, base, budget, stop_at_first=locked is None)
    if locked is not None:
        # a gap at |eps| > delta only says the plateau is narrower than eps
        clash = [h for h in hits if abs(h.eps) <= locked.delta]
        if clash:
            return Undecided("inconsistent: locked and unlocked certificates both fired "
                             + "; ".join(h.summary() for h in clash))
        return locked
    if hits:
        first = hits[0]
        evidence = "; ".join(h.summary() for h in hits)
        return type(first)(first.eps, first.n, first.gap_per_step, notes=evidence)
    return Undecided("; ".join([lnote] + unotes + ["no unlocked gap"]))


def plateau_width(fam_builder: Callable[[float], FiberFamily], tau0: float,
                  budget: Budget = Budget(), base: BaseMap = Rotation(),
                  resolution: float = PLATEAU_RESOLUTION, max_reach: float = 2.0) -> float:
    """Two-sided width of the locked plateau of ``tau -> rho`` around ``tau0``."""
    def is_locked(t):
        return isinstance(classify(fam_builder(t), base, budget, search_unlocked=False), Locked)

    if not is_locked(tau0):
        raise ValueError(f"tau0={tau0} does not classify as locked")
    width = 0.0
    for sign in (1.0, -1.0):
        inner, outer = 0.0, 0.01
        while is_locked(tau0 + sign * outer):
            inner, outer = outer, 2 * outer
            if outer > max_reach:
                raise ValueError("plateau extends beyond max_reach")
        while outer - inner > resolution:
            mid = 0.5 * (inner + outer)
            if is_locked(tau0 + sign * mid):
                inner = mid
            else:
                outer = mid
        width += inner
    return width


__all__ = [
    "Strip", "StripCheck", "Locked", "UnlockedUp", "UnlockedDown", "Undecided",
    "LockClassification", "Budget", "check_strip", "locked_certificate",
    "find_candidate_strip", "unlocked_certificate", "unlocked_evidence", "unlocked_gap", "classify",
    "plateau_width", "Unlocked",
]
