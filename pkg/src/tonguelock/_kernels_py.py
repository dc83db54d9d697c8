"""Pure numpy orbit kernel, vectorized across start points.

Same contract as the compiled ``_kernels.orbit_sums``; used when the
extension is not built or ``TONGUELOCK_PURE=1``.
"""
import numpy as np

TWO_PI = 2.0 * np.pi


def _harmonics(t, m):
    k = np.arange(1, m + 1)[:, None]
    ang = TWO_PI * k * t[None, :]
    return np.cos(ang), np.sin(ang)


def orbit_sums(kind, params, radices, coords, digits, y0, n, eps, coef, want_log):
    coef = np.ascontiguousarray(coef, dtype=float)
    rows, cols = coef.shape
    nk = (rows - 1) // 2
    nm = (cols - 1) // 2
    x = np.array(coords, dtype=float, copy=True)
    d = np.array(digits, dtype=np.int64, copy=True)
    y = np.array(y0, dtype=float, copy=True)
    npts = y.size
    logd = np.zeros(npts)
    rad = np.asarray(radices, dtype=np.int64)
    weights = 1.0 / np.cumprod(rad.astype(float))
    kk = TWO_PI * np.arange(1, nk + 1)[:, None]

    base_coef = coef[:, 0][:, None] * np.ones(npts)
    for _ in range(n):
        if nm:
            if kind == 2:
                theta = d @ weights
            else:
                theta = x[:, -1]
            ct, st = _harmonics(theta, nm)
            c = coef[:, :1] + coef[:, 1:1 + nm] @ ct + coef[:, 1 + nm:] @ st
        else:
            c = base_coef
        shift = c[0]
        if nk:
            cy, sy = _harmonics(y, nk)
            amp_a = c[1:1 + nk]
            amp_b = c[1 + nk:]
            if want_log:
                logd += np.log1p((kk * (amp_b * cy - amp_a * sy)).sum(axis=0))
            y = y + shift + (amp_a * cy + amp_b * sy).sum(axis=0) + eps
        else:
            y = y + shift + eps
        if kind == 0:
            x = np.mod(x + params, 1.0)
        elif kind == 1:
            x = np.stack([np.mod(x[:, 0] + params[0], 1.0), np.mod(x[:, 1] + x[:, 0], 1.0)], axis=1)
        else:
            active = np.ones(npts, dtype=bool)
            for i in range(d.shape[1]):
                d[active, i] += 1
                active &= d[:, i] >= rad[i]
                d[active, i] = 0
                if not active.any():
                    break
    return y - y0, logd
