"""Rotation numbers, mode-locking certificates and Lyapunov brackets for
circle diffeomorphisms forced by a uniquely ergodic base map."""

__version__ = "0.1.0"

from .base import BasePoint, Odometer, Rotation, SkewShift, orbit, step  # noqa: E402
from .fiber import ArnoldFamily, PFamily, TrigLift, lift_eval, lift_inverse  # noqa: E402
from .locking import Budget, classify  # noqa: E402
from .rotation import rotation_enclosure  # noqa: E402
from .trigpoly import TrigPoly  # noqa: E402

__all__ = [
    "BasePoint", "Rotation", "SkewShift", "Odometer", "orbit", "step",
    "ArnoldFamily", "PFamily", "TrigLift", "lift_eval", "lift_inverse",
    "Budget", "classify", "rotation_enclosure", "TrigPoly",
]
