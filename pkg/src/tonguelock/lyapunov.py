"""Finite-time brackets for the extremal fiberwise Lyapunov exponents."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .base import BaseMap, BasePoint
from .fiber import FiberFamily, grid_orbits, growth_sum, point_orbits
from .rotation import DEFAULT_GRID, _rigor, product_grid

_FP = 4 * np.finfo(float).eps


@dataclass(frozen=True)
class ExponentEstimate:
    """``lower_L_minus <= L_-`` and ``L_+ <= upper_L_plus`` when margins are valid.

    ``grid_upper`` / ``grid_lower`` are the margin-free grid extremes, all
    values per step.
    """

    n: int
    upper_L_plus: float
    lower_L_minus: float
    margin_upper: float
    margin_lower: float
    grid_upper: float
    grid_lower: float
    grid_x: int
    grid_y: int
    rigor: str

    @property
    def margin(self) -> float:
        return max(self.margin_upper, self.margin_lower)

    @property
    def objective(self) -> float:
        """``max(L_+, -L_-)`` on the grid, the quantity the exponent probe descends."""
        return max(self.grid_upper, -self.grid_lower)


def log_derivative_sum(fam: FiberFamily, base: BaseMap, x: BasePoint, w: float, n: int) -> float:
    """``log D(F^n)_x(w)`` by the chain rule."""
    if n < 1:
        raise ValueError("n must be >= 1")
    _, logd = point_orbits(fam, base, [x], w, n, want_log=True)
    return float(logd[0])


def _lipschitz_per_step(fam: FiberFamily, n: int, grid_x: int, grid_y: int) -> float:
    """Chain-rule bound on how far the grid sup/inf of ``log D(F^n)`` can miss
    the true one, divided by ``n``."""
    d2 = fam.deriv2_bound / fam.deriv_min
    lip_w = d2 * growth_sum(fam.deriv_max, n)
    lip_x = 0.0
    if fam.depends_on_base:
        cross = fam.cross_bound / fam.deriv_min
        # sum_{k<n} (cross + d2 * Lb * sum_{j<k} dmax^j)
        if fam.deriv_max == 1.0:
            inner = n * (n - 1) / 2.0
        else:
            inner = (growth_sum(fam.deriv_max, n) - n) / (fam.deriv_max - 1.0)
        lip_x = n * cross + d2 * fam.base_lipschitz * inner
    total = 0.5 / grid_x * lip_x + 0.5 / grid_y * lip_w
    return total / n if math.isfinite(total) else math.inf


def exponent_bounds(fam: FiberFamily, base: BaseMap, n: int, grid_x: int = DEFAULT_GRID,
                    grid_y: int = DEFAULT_GRID) -> ExponentEstimate:
    """Grid sup/inf of ``(1/n) log D(F^n)`` widened to certified brackets.

    Each side's margin is the smaller of the chain-rule Lipschitz budget
    and the distance to the a-priori bound ``log deriv_max`` (resp.
    ``log deriv_min``), which no orbit can exceed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if grid_x < 2 or grid_y < 2:
        raise ValueError("grids need at least 2 nodes per dimension")
    coords, digits, ys = product_grid(fam, base, grid_x, grid_y)
    _, logd = grid_orbits(fam, base, coords, digits, ys, n, 0.0, want_log=True)
    g_hi = float(logd.max()) / n
    g_lo = float(logd.min()) / n
    lip = _lipschitz_per_step(fam, n, grid_x, grid_y)
    top = math.log(fam.deriv_max)
    bottom = math.log(fam.deriv_min)
    fp = _FP * (1.0 + abs(top) + abs(bottom))
    m_up = min(lip, max(top - g_hi, 0.0)) + fp
    m_lo = min(lip, max(g_lo - bottom, 0.0)) + fp
    return ExponentEstimate(n, float(g_hi + m_up), float(g_lo - m_lo), float(m_up), float(m_lo),
                            g_hi, g_lo, grid_x, grid_y, _rigor(base))


def simpson_weights(nodes: int) -> np.ndarray:
    if nodes < 8 or nodes % 2:
        raise ValueError("Simpson needs an even number of intervals, at least 8")
    w = np.ones(nodes + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / (3.0 * nodes)


def derivative_integral_check(fam: FiberFamily, base: BaseMap, x: BasePoint, n: int,
                              nodes: int = 4096) -> float:
    """Composite Simpson quadrature of ``w -> D(F^n)_x(w)`` over one period (should be 1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    weights = simpson_weights(nodes)
    w = np.arange(nodes + 1) / nodes
    _, logd = point_orbits(fam, base, [x] * w.size, w, n, want_log=True)
    # np.sum reduces pairwise
    return float(np.sum(weights * np.exp(logd)))
