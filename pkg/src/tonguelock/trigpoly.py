"""Real trigonometric polynomials on the circle R/Z."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class TrigPoly:
    """``c + sum_k a_k cos(2 pi k w) + b_k sin(2 pi k w)``, k = 1..K.

    Coefficient sequences are padded with zeros to a common length K.
    """

    constant: float = 0.0
    cosine_coeffs: tuple[float, ...] = ()
    sine_coeffs: tuple[float, ...] = ()
    deriv_bound: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a = tuple(float(v) for v in self.cosine_coeffs)
        b = tuple(float(v) for v in self.sine_coeffs)
        k = max(len(a), len(b))
        a = a + (0.0,) * (k - len(a))
        b = b + (0.0,) * (k - len(b))
        if not all(np.isfinite(a + b + (float(self.constant),))):
            raise ValueError("TrigPoly coefficients must be finite")
        object.__setattr__(self, "constant", float(self.constant))
        object.__setattr__(self, "cosine_coeffs", a)
        object.__setattr__(self, "sine_coeffs", b)
        object.__setattr__(self, "deriv_bound", self._weighted_l1(1))

    @property
    def modes(self) -> int:
        return len(self.cosine_coeffs)

    def _weighted_l1(self, order: int) -> float:
        return float(sum((TWO_PI * k) ** order * (abs(a) + abs(b))
                         for k, (a, b) in enumerate(zip(self.cosine_coeffs, self.sine_coeffs), 1)))

    @property
    def sup_bound(self) -> float:
        """Upper bound on sup |p| from the coefficient l1 sum."""
        return abs(self.constant) + self._weighted_l1(0)

    @property
    def second_deriv_bound(self) -> float:
        return self._weighted_l1(2)

    @property
    def is_constant(self) -> bool:
        return not any(self.cosine_coeffs) and not any(self.sine_coeffs)

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        out = np.full(w.shape, self.constant)
        for k, (a, b) in enumerate(zip(self.cosine_coeffs, self.sine_coeffs), 1):
            out = out + a * np.cos(TWO_PI * k * w) + b * np.sin(TWO_PI * k * w)
        return out if out.ndim else float(out)

    def derivative(self, w):
        w = np.asarray(w, dtype=float)
        out = np.zeros(w.shape)
        for k, (a, b) in enumerate(zip(self.cosine_coeffs, self.sine_coeffs), 1):
            out = out + TWO_PI * k * (b * np.cos(TWO_PI * k * w) - a * np.sin(TWO_PI * k * w))
        return out if out.ndim else float(out)

    def __add__(self, other: TrigPoly) -> TrigPoly:
        k = max(self.modes, other.modes)
        a, b = self.padded(k), other.padded(k)
        return TrigPoly.from_vector(a + b)

    def scaled(self, factor: float) -> TrigPoly:
        return TrigPoly.from_vector(factor * self.to_vector())

    def padded(self, modes: int) -> np.ndarray:
        """Coefficient vector ``[c, a_1..a_M, b_1..b_M]`` with M = max(modes, K)."""
        m = max(modes, self.modes)
        a = np.zeros(m)
        b = np.zeros(m)
        a[: self.modes] = self.cosine_coeffs
        b[: self.modes] = self.sine_coeffs
        return np.concatenate(([self.constant], a, b))

    def to_vector(self) -> np.ndarray:
        return self.padded(self.modes)

    @classmethod
    def from_vector(cls, v: Sequence[float]) -> TrigPoly:
        v = np.asarray(v, dtype=float)
        if v.size % 2 != 1:
            raise ValueError("coefficient vector must have odd length 1 + 2K")
        k = (v.size - 1) // 2
        return cls(float(v[0]), tuple(v[1:1 + k]), tuple(v[1 + k:]))

    @classmethod
    def parse(cls, text: str) -> TrigPoly:
        """Parse ``"c0; a1,b1; a2,b2; ..."``."""
        parts = [p.strip() for p in text.strip().split(";")]
        if not parts or parts[0] == "":
            raise ValueError(f"empty trig polynomial: {text!r}")
        c0 = float(parts[0])
        a, b = [], []
        for p in parts[1:]:
            if p == "":
                continue
            pair = [s.strip() for s in p.split(",")]
            if len(pair) != 2:
                raise ValueError(f"expected 'a,b' pair, got {p!r}")
            a.append(float(pair[0]))
            b.append(float(pair[1]))
        return cls(c0, tuple(a), tuple(b))

    def format(self) -> str:
        parts = [repr(self.constant)]
        parts += [f"{a!r},{b!r}" for a, b in zip(self.cosine_coeffs, self.sine_coeffs)]
        return "; ".join(parts)


def cosine_forcing(amplitude: float = 1.0) -> TrigPoly:
    return TrigPoly(0.0, (amplitude,), (0.0,))
