"""Base homeomorphisms: torus rotations, the skew-shift and odometers.

Forcing functions read a single circle coordinate off a base point, the
*phase*: the last torus coordinate, or for odometer points the mixed-radix
value ``sum_i d_i / (r_0 ... r_i)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

GOLDEN = (5 ** 0.5 - 1) / 2

ROTATION, SKEWSHIFT, ODOMETER = 0, 1, 2


class DomainShapeError(ValueError):
    """A base point does not live on the base map's space."""


@dataclass(frozen=True)
class BasePoint:
    coords: tuple[float, ...] = ()
    digits: tuple[int, ...] = ()
    radices: tuple[int, ...] = ()

    def __post_init__(self):
        if self.coords and self.digits:
            raise DomainShapeError("a base point is either a torus point or an odometer point")
        coords = tuple(float(c) for c in self.coords)
        if any(not 0.0 <= c < 1.0 for c in coords):
            raise DomainShapeError(f"torus coordinates must lie in [0, 1): {coords}")
        object.__setattr__(self, "coords", coords)
        if self.digits:
            if len(self.radices) != len(self.digits):
                raise DomainShapeError("odometer point needs one radix per digit")
            digits = tuple(int(d) for d in self.digits)
            if any(not 0 <= d < r for d, r in zip(digits, self.radices)):
                raise DomainShapeError(f"digits {digits} out of range for radices {self.radices}")
            object.__setattr__(self, "digits", digits)
            object.__setattr__(self, "radices", tuple(int(r) for r in self.radices))

    @classmethod
    def torus(cls, *coords: float) -> BasePoint:
        return cls(coords=tuple(c % 1.0 for c in coords))

    @classmethod
    def odometer(cls, digits: Sequence[int], radices: Sequence[int]) -> BasePoint:
        return cls(digits=tuple(digits), radices=tuple(radices))

    @property
    def phase(self) -> float:
        if self.digits:
            return _odometer_phase(np.array(self.digits), np.array(self.radices))
        return self.coords[-1]


def _odometer_phase(digits: np.ndarray, radices: np.ndarray) -> float:
    weights = 1.0 / np.cumprod(radices.astype(float))
    return float(np.dot(digits, weights))


def circle_dist(a, b):
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) % 1.0
    return np.minimum(d, 1.0 - d)


class BaseMap:
    """Common interface; concrete maps are frozen dataclasses below."""

    kind: int
    isometric: bool
    lipschitz_in_base: float

    def step(self, p: BasePoint) -> BasePoint:
        raise NotImplementedError

    def origin(self) -> BasePoint:
        raise NotImplementedError

    def grid(self, count: int) -> list[BasePoint]:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator) -> BasePoint:
        raise NotImplementedError

    def kernel_params(self) -> np.ndarray:
        raise NotImplementedError

    def kernel_radices(self, depth: int = 1) -> np.ndarray:
        return np.ones(max(depth, 1), dtype=np.int64)

    def kernel_state(self, points: Sequence[BasePoint]) -> tuple[np.ndarray, np.ndarray]:
        """Arrays ``(coords, digits)`` for the orbit kernels."""
        coords = np.array([p.coords for p in points], dtype=float)
        if coords.ndim == 1:
            coords = coords.reshape(len(points), -1)
        digits = np.zeros((len(points), 1), dtype=np.int64)
        return coords, digits

    @property
    def is_circle_rotation(self) -> bool:
        return False


@dataclass(frozen=True)
class Rotation(BaseMap):
    omega: tuple[float, ...] = (GOLDEN,)

    kind = ROTATION
    isometric = True
    lipschitz_in_base = 1.0

    def __post_init__(self):
        omega = tuple(float(w) for w in np.atleast_1d(self.omega))
        if not omega:
            raise ValueError("rotation needs at least one frequency")
        object.__setattr__(self, "omega", omega)

    @property
    def dim(self) -> int:
        return len(self.omega)

    @property
    def is_circle_rotation(self) -> bool:
        return self.dim == 1

    def _check(self, p: BasePoint):
        if p.digits or len(p.coords) != self.dim:
            raise DomainShapeError(f"expected a point on T^{self.dim}, got {p}")

    def step(self, p):
        self._check(p)
        return BasePoint(coords=tuple((c + w) % 1.0 for c, w in zip(p.coords, self.omega)))

    def origin(self):
        return BasePoint(coords=(0.0,) * self.dim)

    def grid(self, count):
        axis = np.arange(count) / count
        mesh = np.meshgrid(*([axis] * self.dim), indexing="ij")
        return [BasePoint(coords=tuple(c)) for c in np.stack([m.ravel() for m in mesh], axis=1)]

    def sample(self, rng):
        return BasePoint(coords=tuple(rng.random(self.dim)))

    def kernel_params(self):
        return np.array(self.omega, dtype=float)


@dataclass(frozen=True)
class SkewShift(BaseMap):
    alpha: float = GOLDEN

    kind = SKEWSHIFT
    isometric = False
    # declared heuristic: the map shears the phase coordinate
    lipschitz_in_base = 2.0

    def step(self, p):
        if p.digits or len(p.coords) != 2:
            raise DomainShapeError(f"skew-shift acts on T^2, got {p}")
        x, y = p.coords
        return BasePoint(coords=((x + self.alpha) % 1.0, (y + x) % 1.0))

    def origin(self):
        return BasePoint(coords=(0.0, 0.0))

    def grid(self, count):
        axis = np.arange(count) / count
        return [BasePoint(coords=(a, b)) for a in axis for b in axis]

    def sample(self, rng):
        return BasePoint(coords=tuple(rng.random(2)))

    def kernel_params(self):
        return np.array([self.alpha], dtype=float)


@dataclass(frozen=True)
class Odometer(BaseMap):
    """Add-one-with-carry on a window of ``depth`` digits.

    ``radices`` is repeated cyclically to fill the window; carries past the
    last digit wrap around.
    """

    radices: tuple[int, ...] = (2,)
    depth: int = 32

    kind = ODOMETER
    isometric = False
    lipschitz_in_base = 1.0

    def __post_init__(self):
        radices = tuple(int(r) for r in self.radices)
        if not radices or any(r < 2 for r in radices):
            raise ValueError("odometer radices must all be >= 2")
        if self.depth < 1:
            raise ValueError("odometer depth must be positive")
        object.__setattr__(self, "radices", radices)

    def window_radices(self, depth: int | None = None) -> tuple[int, ...]:
        depth = self.depth if depth is None else depth
        return tuple(self.radices[i % len(self.radices)] for i in range(depth))

    def _check(self, p: BasePoint):
        if p.coords or not p.digits or p.radices != self.window_radices(len(p.digits)):
            raise DomainShapeError(f"point {p} is not in this odometer's digit space")

    def step(self, p):
        self._check(p)
        digits = list(p.digits)
        for i, r in enumerate(p.radices):
            digits[i] += 1
            if digits[i] < r:
                break
            digits[i] = 0
        return BasePoint(digits=tuple(digits), radices=p.radices)

    def origin(self):
        return BasePoint(digits=(0,) * self.depth, radices=self.window_radices())

    def point_at_phase(self, t: float) -> BasePoint:
        """Digit expansion of ``t`` in [0, 1) in the mixed radix."""
        digits = []
        t = t % 1.0
        for r in self.window_radices():
            t *= r
            d = min(int(t), r - 1)
            digits.append(d)
            t -= d
        return BasePoint(digits=tuple(digits), radices=self.window_radices())

    def grid(self, count):
        return [self.point_at_phase(k / count) for k in range(count)]

    def sample(self, rng):
        rad = self.window_radices()
        return BasePoint(digits=tuple(int(rng.integers(r)) for r in rad), radices=rad)

    def kernel_params(self):
        return np.zeros(1)

    def kernel_radices(self, depth=1):
        return np.array(self.window_radices(), dtype=np.int64)

    def kernel_state(self, points):
        digits = np.array([p.digits for p in points], dtype=np.int64).reshape(len(points), -1)
        return np.zeros((len(points), 1)), digits


BaseMapT = Union[Rotation, SkewShift, Odometer]


def step(base: BaseMap, p: BasePoint) -> BasePoint:
    return base.step(p)


def orbit(base: BaseMap, p: BasePoint, n: int) -> list[BasePoint]:
    if n < 1:
        raise ValueError("orbit length must be >= 1")
    out = [p]
    for _ in range(n):
        out.append(base.step(out[-1]))
    return out


@dataclass(frozen=True)
class SchwartzmanGenerators:
    """Known elements of the Schwartzman range, each with a witness pair.

    ``witnesses[i] = (phi, psi)`` satisfies ``psi(g x) - psi(x) = phi(x) mod 1``
    and ``generators[i]`` is the mean of ``phi``.
    """

    generators: tuple[float, ...]
    rigor: str
    witnesses: tuple[tuple[Callable[[BasePoint], float], Callable[[BasePoint], float]], ...]


def _const(t):
    return lambda p: t


def _coord(i):
    return lambda p: p.coords[i]


def _cylinder(k, period):
    def psi(p):
        value, place = 0, 1
        for d, r in zip(p.digits[:k], p.radices[:k]):
            value += d * place
            place *= r
        return value / period
    return psi


def schwartzman_generators(base: BaseMap) -> SchwartzmanGenerators:
    gens: list[float] = [1.0]
    wit = [(_const(1.0), _const(0.0))]
    if isinstance(base, Rotation):
        for i, w in enumerate(base.omega):
            gens.append(w)
            wit.append((_const(w), _coord(i)))
    elif isinstance(base, SkewShift):
        gens.append(base.alpha)
        wit.append((_const(base.alpha), _coord(0)))
    elif isinstance(base, Odometer):
        period = 1
        for k, r in enumerate(base.radices, 1):
            period *= r
            gens.append(1.0 / period)
            wit.append((_const(1.0 / period), _cylinder(k, period)))
    else:
        raise TypeError(f"unsupported base map {base!r}")
    return SchwartzmanGenerators(tuple(gens), "exact", tuple(wit))


def cocycle_residual(base: BaseMap, phi: Callable[[BasePoint], float],
                     psi: Callable[[BasePoint], float], samples: int = 10_000,
                     seed: int = 0) -> float:
    """Max over seeded samples of the circle distance between
    ``psi(g x) - psi(x)`` and ``phi(x)``."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        x = base.sample(rng)
        worst = max(worst, float(circle_dist(psi(base.step(x)) - psi(x), phi(x))))
    return worst
