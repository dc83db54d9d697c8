"""Backend selection for the orbit kernel.

The compiled extension is used when importable; ``TONGUELOCK_PURE=1``
forces the numpy fallback.
"""
import os

import numpy as np

from . import _kernels_py

BACKEND = "numpy"
_impl = _kernels_py.orbit_sums

if os.environ.get("TONGUELOCK_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        _impl = _compiled.orbit_sums
        BACKEND = "cython"


def orbit_sums(kind, params, radices, coords, digits, y0, n, eps, coef, want_log=False, impl=None):
    """Iterate the eps-shifted skew product ``n`` times from each start point.

    Returns ``(displacement, log_derivative_sum)`` arrays, one entry per
    start point ``(coords[p] or digits[p], y0[p])``.
    """
    fn = impl or _impl
    return fn(int(kind),
              np.ascontiguousarray(params, dtype=np.float64),
              np.ascontiguousarray(radices, dtype=np.int64),
              np.ascontiguousarray(coords, dtype=np.float64),
              np.ascontiguousarray(digits, dtype=np.int64),
              np.ascontiguousarray(y0, dtype=np.float64),
              int(n), float(eps),
              np.ascontiguousarray(coef, dtype=np.float64),
              bool(want_log))


def available_backends():
    out = {"numpy": _kernels_py.orbit_sums}
    try:
        from . import _kernels
        out["cython"] = _kernels.orbit_sums
    except ImportError:
        pass
    return out
