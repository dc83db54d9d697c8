"""Finite-time displacement bounds and rotation-number enclosures.

The sup/inf of the n-step displacement over ``X x R`` is estimated on a
product grid and widened by a margin.  Two margins are computed and the
smaller one is used:

* a Lipschitz budget propagated through the chain rule, which vanishes
  for base-independent rigid rotations;
* a monotone comparison: between y-nodes the displacement is bracketed by
  the neighbouring node values plus the mesh, and base points within
  ``h_x / 2`` of a node are dominated by the ``+/- base_lipschitz * h_x / 2``
  shifted family started at that node (base orbits of a rotation stay
  equidistant).  This budget never blows up exponentially.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .base import BaseMap, BasePoint
from .fiber import FiberFamily, grid_orbits, growth_sum, point_orbits, safe_pow

DEFAULT_GRID = 64
DEFAULT_N = 4096
SCAN_N = 16384
FLAG_RATIO = 0.25
_FP = 4 * np.finfo(float).eps


@dataclass(frozen=True)
class DisplacementStats:
    n: int
    m_lo: float
    m_hi: float
    margin: float
    grid_x: int
    grid_y: int
    rigor: str

    @property
    def flagged(self) -> bool:
        """Margin too large for the stats to be used as evidence."""
        return not self.margin / self.n <= FLAG_RATIO

    @property
    def lo_bound(self) -> float:
        return self.m_lo - self.margin

    @property
    def hi_bound(self) -> float:
        return self.m_hi + self.margin


@dataclass(frozen=True)
class RotationEnclosure:
    lo: float
    hi: float
    n: int
    rigor: str
    flagged: bool = False

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, value: float) -> bool:
        return self.lo <= value <= self.hi


@lru_cache(maxsize=64)
def base_grid(base: BaseMap, grid_x: int) -> tuple[np.ndarray, np.ndarray]:
    coords, digits = base.kernel_state(base.grid(grid_x))
    coords.setflags(write=False)
    digits.setflags(write=False)
    return coords, digits


def product_grid(fam: FiberFamily, base: BaseMap, grid_x: int, grid_y: int):
    """Start points ``(coords, digits, ys)`` of the (base x fiber) grid.

    Base-independent families collapse the base axis to one point; their
    displacement does not depend on it.
    """
    coords, digits = base_grid(base, grid_x)
    if not fam.depends_on_base:
        coords, digits = coords[:1], digits[:1]
    ys = np.arange(grid_y) / grid_y
    nx = coords.shape[0]
    return (np.repeat(coords, grid_y, axis=0), np.repeat(digits, grid_y, axis=0),
            np.tile(ys, nx))


def grid_displacements(fam, base, n, grid_x, grid_y, eps=0.0) -> np.ndarray:
    coords, digits, ys = product_grid(fam, base, grid_x, grid_y)
    disp, _ = grid_orbits(fam, base, coords, digits, ys, n, eps)
    return disp


def lipschitz_margin(fam: FiberFamily, n: int, grid_x: int, grid_y: int) -> float:
    hx, hy = 0.5 / grid_x, 0.5 / grid_y
    x_part = 0.0
    if fam.base_lipschitz > 0.0:
        x_part = fam.base_lipschitz * hx * growth_sum(fam.deriv_max, n)
    spread = max(safe_pow(fam.deriv_max, n) - 1.0, 1.0 - fam.deriv_min ** n)
    return x_part + hy * spread


def displacement_bounds(fam: FiberFamily, base: BaseMap, n: int, grid_x: int = DEFAULT_GRID,
                        grid_y: int = DEFAULT_GRID, eps: float = 0.0) -> DisplacementStats:
    _check_args(n, grid_x, grid_y)
    disp = grid_displacements(fam, base, n, grid_x, grid_y, eps)
    m_lo, m_hi = float(disp.min()), float(disp.max())
    margin = lipschitz_margin(fam, n, grid_x, grid_y)
    hy = 1.0 / grid_y
    if margin > hy:
        delta = _comparison_shift(fam, grid_x)
        if delta > 0.0:
            hi = grid_displacements(fam, base, n, grid_x, grid_y, eps + delta).max()
            lo = grid_displacements(fam, base, n, grid_x, grid_y, eps - delta).min()
        else:
            hi, lo = m_hi, m_lo
        monotone = max(hi + hy - m_hi, m_lo - (lo - hy))
        margin = min(margin, float(monotone))
    margin += _fp_slack(n, m_lo, m_hi)
    return DisplacementStats(n, m_lo, m_hi, float(margin), grid_x, grid_y, _rigor(base))


def side_bound(fam: FiberFamily, base: BaseMap, n: int, grid_x: int, grid_y: int,
               eps: float, side: int) -> tuple[float, float]:
    """Certified upper (``side=+1``) or lower (``side=-1``) bound on the n-step
    displacement of ``F + eps`` over all start points, with the margin it
    adds to the grid extreme it was built from.

    Cheaper than :func:`displacement_bounds` when only one side is needed:
    one grid pass instead of up to three.
    """
    _check_args(n, grid_x, grid_y)
    lip = lipschitz_margin(fam, n, grid_x, grid_y)
    hy = 1.0 / grid_y
    pick = np.max if side > 0 else np.min
    if lip <= hy:
        ext = float(pick(grid_displacements(fam, base, n, grid_x, grid_y, eps)))
        margin = lip
    else:
        delta = _comparison_shift(fam, grid_x)
        ext = float(pick(grid_displacements(fam, base, n, grid_x, grid_y, eps + side * delta)))
        margin = hy
    margin += _fp_slack(n, ext, ext)
    return ext + side * margin, margin


def _check_args(n, grid_x, grid_y):
    if n < 1:
        raise ValueError("n must be >= 1")
    if grid_x < 2 or grid_y < 2:
        raise ValueError("grids need at least 2 nodes per dimension")


def _comparison_shift(fam: FiberFamily, grid_x: int) -> float:
    return fam.base_lipschitz * 0.5 / grid_x if fam.depends_on_base else 0.0


def _fp_slack(n, m_lo, m_hi) -> float:
    return _FP * n * (2.0 + max(abs(m_lo), abs(m_hi)))


def _rigor(base: BaseMap) -> str:
    return "rigorous" if base.isometric else "heuristic"


def rotation_enclosure(fam: FiberFamily, base: BaseMap, n: int = DEFAULT_N,
                       grid_x: int = DEFAULT_GRID, grid_y: int = DEFAULT_GRID,
                       eps: float = 0.0) -> RotationEnclosure:
    st = displacement_bounds(fam, base, n, grid_x, grid_y, eps)
    return RotationEnclosure(st.lo_bound / n, st.hi_bound / n, n, st.rigor, st.flagged)


def rho_orbit_estimate(fam: FiberFamily, base: BaseMap, x: BasePoint, y: float,
                       n: int = SCAN_N) -> float:
    """Uncertified ``displacement / n`` along one orbit."""
    if n < 1:
        raise ValueError("n must be >= 1")
    disp, _ = point_orbits(fam, base, [x], y, n)
    return float(disp[0]) / n


def enclosure_overlap(a: RotationEnclosure, b: RotationEnclosure) -> bool:
    return max(a.lo, b.lo) <= min(a.hi, b.hi) + 1e-15


__all__ = [
    "DisplacementStats", "RotationEnclosure", "displacement_bounds", "rotation_enclosure",
    "rho_orbit_estimate", "lipschitz_margin", "grid_displacements", "product_grid", "side_bound",
]
