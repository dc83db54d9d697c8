# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled orbit kernel.  Consecutive start points with the same base state
are advanced together so the base coefficients are evaluated once per step."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, log1p, floor, M_PI

cnp.import_array()


cdef inline double _wrap(double v) noexcept nogil:
    return v - floor(v)


cdef inline bint _same_base(const double[:, ::1] coords, const long long[:, ::1] digits,
                            Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(coords.shape[1]):
        if coords[a, i] != coords[b, i]:
            return False
    for i in range(digits.shape[1]):
        if digits[a, i] != digits[b, i]:
            return False
    return True


def orbit_sums(int kind, const double[::1] params, const long long[::1] radices,
               const double[:, ::1] coords, const long long[:, ::1] digits,
               const double[::1] y0, long n, double eps, const double[:, ::1] coef,
               bint want_log):
    cdef Py_ssize_t npts = y0.shape[0]
    cdef Py_ssize_t rows = coef.shape[0], cols = coef.shape[1]
    cdef Py_ssize_t nk = (rows - 1) // 2, nm = (cols - 1) // 2
    cdef Py_ssize_t dim = coords.shape[1], depth = digits.shape[1]
    cdef double[::1] disp = np.empty(npts)
    cdef double[::1] logd = np.zeros(npts)
    cdef double[::1] x = np.empty(max(dim, 1))
    cdef long long[::1] d = np.empty(max(depth, 1), dtype=np.int64)
    cdef double[::1] weights = 1.0 / np.cumprod(np.asarray(radices, dtype=float))
    cdef double[::1] c = np.empty(rows)
    cdef double[::1] ct = np.empty(max(nm, 1))
    cdef double[::1] st = np.empty(max(nm, 1))
    cdef double[::1] ys = np.empty(npts)
    cdef Py_ssize_t p, i, j, k, m, g0, g1
    cdef long step
    cdef double y, theta, c1, s1, ck, sk, tmp, acc, dacc, x0
    cdef double twopi = 2.0 * M_PI

    with nogil:
        g0 = 0
        while g0 < npts:
            # start points sharing a base state share its coefficient sequence
            g1 = g0 + 1
            while g1 < npts and _same_base(coords, digits, g0, g1):
                g1 += 1
            for i in range(dim):
                x[i] = coords[g0, i]
            for i in range(depth):
                d[i] = digits[g0, i]
            for p in range(g0, g1):
                ys[p] = y0[p]
            for j in range(rows):
                c[j] = coef[j, 0]
            for step in range(n):
                if nm > 0:
                    if kind == 2:
                        theta = 0.0
                        for i in range(depth):
                            theta = theta + d[i] * weights[i]
                    else:
                        theta = x[dim - 1]
                    c1 = cos(twopi * theta)
                    s1 = sin(twopi * theta)
                    ck = c1
                    sk = s1
                    for m in range(nm):
                        ct[m] = ck
                        st[m] = sk
                        tmp = ck * c1 - sk * s1
                        sk = sk * c1 + ck * s1
                        ck = tmp
                    for j in range(rows):
                        acc = coef[j, 0]
                        for m in range(nm):
                            acc = acc + coef[j, 1 + m] * ct[m] + coef[j, 1 + nm + m] * st[m]
                        c[j] = acc
                for p in range(g0, g1):
                    y = ys[p]
                    acc = c[0]
                    if nk > 0:
                        dacc = 0.0
                        c1 = cos(twopi * y)
                        s1 = sin(twopi * y)
                        ck = c1
                        sk = s1
                        for k in range(nk):
                            acc = acc + c[1 + k] * ck + c[1 + nk + k] * sk
                            if want_log:
                                dacc = dacc + twopi * (k + 1) * (c[1 + nk + k] * ck - c[1 + k] * sk)
                            tmp = ck * c1 - sk * s1
                            sk = sk * c1 + ck * s1
                            ck = tmp
                        if want_log:
                            logd[p] += log1p(dacc)
                    ys[p] = y + acc + eps
                if kind == 0:
                    for i in range(dim):
                        x[i] = _wrap(x[i] + params[i])
                elif kind == 1:
                    x0 = x[0]
                    x[0] = _wrap(x0 + params[0])
                    x[1] = _wrap(x[1] + x0)
                else:
                    for i in range(depth):
                        d[i] += 1
                        if d[i] < radices[i]:
                            break
                        d[i] = 0
            for p in range(g0, g1):
                disp[p] = ys[p] - y0[p]
            g0 = g1
    return np.asarray(disp), np.asarray(logd)
