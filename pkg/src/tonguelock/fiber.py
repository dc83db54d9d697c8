"""Degree-one circle lifts forced by a base map.

Every family is written as

    F_x(y) = y + s(t) + sum_k A_k(t) cos(2 pi k y) + B_k(t) sin(2 pi k y),

with ``t`` the phase of the base point and ``s, A_k, B_k`` trigonometric
polynomials in ``t``.  The coefficient matrix ``coef`` stores one row per
function (``s``, then ``A_1..A_K``, then ``B_1..B_K``) in TrigPoly vector
layout; the orbit kernels consume it directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from . import kernels
from .base import BaseMap, BasePoint
from .trigpoly import TWO_PI, TrigPoly, cosine_forcing

VALIDATION_GRID = (64, 256)


class InverseError(ArithmeticError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class FiberFamily:
    """Shared machinery; subclasses supply :meth:`components`."""

    def components(self) -> tuple[TrigPoly, list[TrigPoly], list[TrigPoly]]:
        raise NotImplementedError

    def _setup(self):
        s, a, b = self.components()
        nk = len(a)
        nm = max([s.modes] + [p.modes for p in a + b])
        coef = np.array([p.padded(nm) for p in [s] + a + b])
        coef.setflags(write=False)
        object.__setattr__(self, "coef", coef)
        ks = np.arange(1, nk + 1)
        sup_a = np.array([p.sup_bound for p in a])
        sup_b = np.array([p.sup_bound for p in b])
        lip_a = np.array([p.deriv_bound for p in a])
        lip_b = np.array([p.deriv_bound for p in b])
        c1 = float(np.sum(TWO_PI * ks * (sup_a + sup_b)))
        object.__setattr__(self, "deriv2_bound", float(np.sum((TWO_PI * ks) ** 2 * (sup_a + sup_b))))
        object.__setattr__(self, "cross_bound", float(np.sum(TWO_PI * ks * (lip_a + lip_b))))
        object.__setattr__(self, "base_lipschitz", float(s.deriv_bound + lip_a.sum() + lip_b.sum()))
        object.__setattr__(self, "disp_bound", float(s.sup_bound + sup_a.sum() + sup_b.sum()))
        object.__setattr__(self, "deriv_max", 1.0 + c1)
        dmin = 1.0 - c1
        if dmin <= 0.0:
            dmin = self._validated_min_derivative()
        if not dmin > 0.0:
            raise ValueError("fiber maps are not orientation-preserving diffeomorphisms "
                             f"(validated derivative lower bound {dmin:.3g})")
        object.__setattr__(self, "deriv_min", float(dmin))
        object.__setattr__(self, "norm_bound", max(self.deriv_max, 1.0 / dmin))

    def _validated_min_derivative(self) -> float:
        gt, gy = VALIDATION_GRID
        if not self.depends_on_base:
            gt = 1
        t, y = np.meshgrid(np.arange(gt) / gt, np.arange(gy) / gy, indexing="ij")
        lo = float(self.derivative_at(t.ravel(), y.ravel()).min())
        return lo - 0.5 * self.deriv2_bound / gy - (0.5 * self.cross_bound / gt if gt > 1 else 0.0)

    @property
    def depends_on_base(self) -> bool:
        return self.coef.shape[1] > 1 and bool(np.any(self.coef[:, 1:]))

    @property
    def fiber_modes(self) -> int:
        return (self.coef.shape[0] - 1) // 2

    def _coeffs_at(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        nm = (self.coef.shape[1] - 1) // 2
        c = np.repeat(self.coef[:, :1], t.size, axis=1)
        if nm:
            ang = TWO_PI * np.arange(1, nm + 1)[:, None] * t[None, :]
            c = c + self.coef[:, 1:1 + nm] @ np.cos(ang) + self.coef[:, 1 + nm:] @ np.sin(ang)
        return c

    def eval_at(self, t, y):
        """``F`` at base phase ``t`` and lift coordinate ``y`` (broadcast)."""
        t, y = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(y, dtype=float))
        shape = y.shape
        t, y = t.ravel(), y.ravel()
        c = self._coeffs_at(t)
        nk = self.fiber_modes
        out = y + c[0]
        if nk:
            ang = TWO_PI * np.arange(1, nk + 1)[:, None] * y[None, :]
            out = out + (c[1:1 + nk] * np.cos(ang) + c[1 + nk:] * np.sin(ang)).sum(axis=0)
        out = out.reshape(shape)
        return out if out.ndim else float(out)

    def derivative_at(self, t, y):
        t, y = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(y, dtype=float))
        shape = y.shape
        t, y = t.ravel(), y.ravel()
        c = self._coeffs_at(t)
        nk = self.fiber_modes
        out = np.ones(y.shape)
        if nk:
            kk = TWO_PI * np.arange(1, nk + 1)[:, None]
            ang = kk * y[None, :]
            out = out + (kk * (c[1 + nk:] * np.cos(ang) - c[1:1 + nk] * np.sin(ang))).sum(axis=0)
        out = out.reshape(shape)
        return out if out.ndim else float(out)

    def fiber_at(self, t: float):
        """Scalar ``(F_t, DF_t)`` with the base coefficients frozen at phase ``t``."""
        c = self._coeffs_at(t)[:, 0].tolist()
        nk = self.fiber_modes
        shift, a, b = c[0], c[1:1 + nk], c[1 + nk:]
        ks = [TWO_PI * k for k in range(1, nk + 1)]

        def f(y):
            return y + shift + sum(ak * math.cos(k * y) + bk * math.sin(k * y)
                                   for k, ak, bk in zip(ks, a, b))

        def df(y):
            return 1.0 + sum(k * (bk * math.cos(k * y) - ak * math.sin(k * y))
                             for k, ak, bk in zip(ks, a, b))
        return f, df

    # perturbation interface used by the probes
    def perturbation_vector(self, modes: int) -> np.ndarray:
        raise NotImplementedError

    def with_perturbation_vector(self, v: np.ndarray) -> FiberFamily:
        raise NotImplementedError


def _frozen_fields():
    return dict(init=False, repr=False, compare=False)


@dataclass(frozen=True)
class ArnoldFamily(FiberFamily):
    """``y + tau + alpha/(2 pi) sin(2 pi y) + beta q(t)``."""

    tau: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    q: TrigPoly = field(default_factory=cosine_forcing)

    coef: np.ndarray = field(**_frozen_fields())
    deriv_max: float = field(**_frozen_fields())
    deriv_min: float = field(**_frozen_fields())
    deriv2_bound: float = field(**_frozen_fields())
    cross_bound: float = field(**_frozen_fields())
    base_lipschitz: float = field(**_frozen_fields())
    disp_bound: float = field(**_frozen_fields())
    norm_bound: float = field(**_frozen_fields())

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        self._setup()

    def components(self):
        s = TrigPoly(self.tau, (), ()) + self.q.scaled(self.beta)
        return s, [TrigPoly()], [TrigPoly(self.alpha / TWO_PI)]

    def perturbation_vector(self, modes):
        return self.q.padded(modes)

    def with_perturbation_vector(self, v):
        return replace(self, q=TrigPoly.from_vector(v))


@dataclass(frozen=True)
class PFamily(FiberFamily):
    """``y + P(y) + h(t)`` with ``P`` a non-constant trig polynomial, ``|P'| < 1``."""

    P: TrigPoly = field(default_factory=lambda: TrigPoly(0.0, (0.0,), (0.1,)))
    forcing: TrigPoly = field(default_factory=cosine_forcing)

    coef: np.ndarray = field(**_frozen_fields())
    deriv_max: float = field(**_frozen_fields())
    deriv_min: float = field(**_frozen_fields())
    deriv2_bound: float = field(**_frozen_fields())
    cross_bound: float = field(**_frozen_fields())
    base_lipschitz: float = field(**_frozen_fields())
    disp_bound: float = field(**_frozen_fields())
    norm_bound: float = field(**_frozen_fields())

    def __post_init__(self):
        if self.P.deriv_bound >= 1.0:
            raise ValueError(f"P needs derivative bound < 1, got {self.P.deriv_bound:.6g}")
        if self.P.is_constant:
            raise ValueError("P must be non-constant")
        self._setup()

    def components(self):
        s = TrigPoly(self.P.constant) + self.forcing
        a = [TrigPoly(v) for v in self.P.cosine_coeffs]
        b = [TrigPoly(v) for v in self.P.sine_coeffs]
        return s, a, b

    def perturbation_vector(self, modes):
        return self.forcing.padded(modes)

    def with_perturbation_vector(self, v):
        return replace(self, forcing=TrigPoly.from_vector(v))


@dataclass(frozen=True)
class TrigLift(FiberFamily):
    """Finite-mode lift with every fiber coefficient a trig polynomial on the base."""

    constant: TrigPoly = field(default_factory=TrigPoly)
    cosine_coeffs: tuple[TrigPoly, ...] = ()
    sine_coeffs: tuple[TrigPoly, ...] = ()

    coef: np.ndarray = field(**_frozen_fields())
    deriv_max: float = field(**_frozen_fields())
    deriv_min: float = field(**_frozen_fields())
    deriv2_bound: float = field(**_frozen_fields())
    cross_bound: float = field(**_frozen_fields())
    base_lipschitz: float = field(**_frozen_fields())
    disp_bound: float = field(**_frozen_fields())
    norm_bound: float = field(**_frozen_fields())

    def __post_init__(self):
        k = max(len(self.cosine_coeffs), len(self.sine_coeffs))
        a = tuple(self.cosine_coeffs) + (TrigPoly(),) * (k - len(self.cosine_coeffs))
        b = tuple(self.sine_coeffs) + (TrigPoly(),) * (k - len(self.sine_coeffs))
        object.__setattr__(self, "cosine_coeffs", a)
        object.__setattr__(self, "sine_coeffs", b)
        self._setup()

    def components(self):
        return self.constant, list(self.cosine_coeffs), list(self.sine_coeffs)

    def _parts(self):
        return [self.constant, *self.cosine_coeffs, *self.sine_coeffs]

    def perturbation_vector(self, modes):
        return np.concatenate([p.padded(modes) for p in self._parts()])

    def with_perturbation_vector(self, v):
        parts = np.split(np.asarray(v, dtype=float), len(self._parts()))
        polys = [TrigPoly.from_vector(p) for p in parts]
        k = len(self.cosine_coeffs)
        return replace(self, constant=polys[0], cosine_coeffs=tuple(polys[1:1 + k]),
                       sine_coeffs=tuple(polys[1 + k:]))


def lift_eval(fam: FiberFamily, x: BasePoint, y: float) -> float:
    return fam.eval_at(x.phase, y)


def lift_derivative(fam: FiberFamily, x: BasePoint, y: float) -> float:
    return fam.derivative_at(x.phase, y)


def lift_inverse(fam: FiberFamily, x: BasePoint, z: float, tol: float = 1e-12,
                 max_iter: int = 60) -> float:
    """Solve ``F_x(y) = z``: bisection to width 1e-6, then Newton polish."""
    f, df = fam.fiber_at(x.phase)
    lo = z - fam.disp_bound - 1e-9
    hi = z + fam.disp_bound + 1e-9
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if f(mid) < z:
            lo = mid
        else:
            hi = mid
    y = 0.5 * (lo + hi)
    scale = tol * max(1.0, abs(z))
    for _ in range(max_iter):
        r = f(y) - z
        if abs(r) < scale:
            return y
        y_new = y - r / df(y)
        # Newton stays inside the bisection bracket for a monotone lift
        y = min(max(y_new, lo), hi)
    r = f(y) - z
    if abs(r) < scale:
        return y
    raise InverseError("lift inverse did not converge", abs(r))


def grid_orbits(fam: FiberFamily, base: BaseMap, coords: np.ndarray, digits: np.ndarray,
                ys: np.ndarray, n: int, eps: float = 0.0, want_log: bool = False):
    """Kernel call on prepared base-state arrays; see :func:`kernels.orbit_sums`."""
    return kernels.orbit_sums(base.kind, base.kernel_params(),
                              base.kernel_radices(digits.shape[1]), coords, digits,
                              ys, n, eps, fam.coef, want_log)


def point_orbits(fam: FiberFamily, base: BaseMap, points: list[BasePoint], ys, n: int,
                 eps: float = 0.0, want_log: bool = False):
    coords, digits = base.kernel_state(points)
    ys = np.broadcast_to(np.asarray(ys, dtype=float), (len(points),))
    return grid_orbits(fam, base, coords, digits, ys, n, eps, want_log)


def displacement_orbit(fam: FiberFamily, base: BaseMap, x: BasePoint, y: float, n: int,
                       eps: float = 0.0) -> float:
    """``(F_eps^n)_x(y) - y`` with ``F_eps = F + eps``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    disp, _ = point_orbits(fam, base, [x], y, n, eps)
    return float(disp[0])


def growth_sum(rate: float, n: int) -> float:
    """``sum_{k<n} rate**k``, inf on overflow."""
    if rate == 1.0:
        return float(n)
    try:
        return (rate ** n - 1.0) / (rate - 1.0)
    except OverflowError:
        return math.inf


def safe_pow(rate: float, n: int) -> float:
    try:
        return rate ** n
    except OverflowError:
        return math.inf
