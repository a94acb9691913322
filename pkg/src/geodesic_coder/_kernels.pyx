# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot loops in ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport atan2, cos, sin, sqrt, fmod, M_PI

cnp.import_array()

cdef double TWO_PI = 2.0 * M_PI


cdef inline double ccw(double a, double x) noexcept nogil:
    cdef double d = fmod(x - a, TWO_PI)
    if d < 0.0:
        d += TWO_PI
    if d >= TWO_PI:
        d = 0.0
    return d


cdef inline Py_ssize_t locate(const double* offsets, Py_ssize_t n, double d, double tol) noexcept nogil:
    # 1-based strip containing offset d, with the tolerance bump of strip_index
    cdef Py_ssize_t lo = 0, hi = n, mid
    cdef double nxt
    while lo < hi:
        mid = (lo + hi) >> 1
        if offsets[mid] <= d:
            lo = mid + 1
        else:
            hi = mid
    nxt = offsets[lo] if lo < n else TWO_PI
    if nxt - d < tol:
        lo = lo % n + 1
    return lo


def strip_index(x, double base, offsets, double tol):
    cdef double[::1] xs = np.ascontiguousarray(np.atleast_1d(x), dtype=np.float64)
    cdef const double[::1] off = np.ascontiguousarray(offsets, dtype=np.float64)
    cdef Py_ssize_t m = xs.shape[0], j
    out = np.empty(m, dtype=np.int64)
    cdef cnp.int64_t[::1] o = out
    with nogil:
        for j in range(m):
            o[j] = locate(&off[0], off.shape[0], ccw(base, xs[j]), tol)
    return out


def _split(ta, tb):
    ta = np.ascontiguousarray(ta, dtype=np.complex128)
    tb = np.ascontiguousarray(tb, dtype=np.complex128)
    return (np.ascontiguousarray(ta.real), np.ascontiguousarray(ta.imag),
            np.ascontiguousarray(tb.real), np.ascontiguousarray(tb.imag))


cdef inline void moebius_z(double ar, double ai, double br, double bi,
                           double* x, double* y) noexcept nogil:
    # z -> (a z + b) / (conj(b) z + conj(a)) on unit complex numbers, renormalised
    cdef double nr = ar * x[0] - ai * y[0] + br
    cdef double ni = ar * y[0] + ai * x[0] + bi
    cdef double dr = br * x[0] + bi * y[0] + ar
    cdef double di = br * y[0] - bi * x[0] - ai
    cdef double qr = nr * dr + ni * di
    cdef double qi = ni * dr - nr * di
    cdef double m = sqrt(qr * qr + qi * qi)
    x[0] = qr / m
    y[0] = qi / m


cdef inline double angle_of(double x, double y) noexcept nogil:
    cdef double t = atan2(y, x)
    if t < 0.0:
        t += TWO_PI
    if t >= TWO_PI:
        t = 0.0
    return t


def extension_orbit(u, w, ta, tb, double base, offsets, double tol, int steps):
    cdef double[::1] uu = np.array(u, dtype=np.float64, copy=True).ravel()
    cdef double[::1] ww = np.array(w, dtype=np.float64, copy=True).ravel()
    cdef const double[::1] off = np.ascontiguousarray(offsets, dtype=np.float64)
    ar_, ai_, br_, bi_ = _split(ta, tb)
    cdef const double[::1] ar = ar_, ai = ai_, br = br_, bi = bi_
    cdef const double* op = &off[0]
    cdef const double* pa = &ar[0]
    cdef const double* pai = &ai[0]
    cdef const double* pb = &br[0]
    cdef const double* pbi = &bi[0]
    cdef Py_ssize_t nb = off.shape[0]
    cdef Py_ssize_t m = uu.shape[0], j, k
    cdef int s
    cdef double ux, uy, wx, wy, wt
    with nogil:
        for j in range(m):
            ux = cos(uu[j])
            uy = sin(uu[j])
            wx = cos(ww[j])
            wy = sin(ww[j])
            wt = ww[j]
            for s in range(steps):
                k = locate(op, nb, ccw(base, wt), tol) - 1
                moebius_z(pa[k], pai[k], pb[k], pbi[k], &ux, &uy)
                moebius_z(pa[k], pai[k], pb[k], pbi[k], &wx, &wy)
                wt = angle_of(wx, wy)
            if steps > 0:
                uu[j] = angle_of(ux, uy)
                ww[j] = wt
    return np.asarray(uu), np.asarray(ww)


def extension_occupancy(u, w, ta, tb, double base, offsets, double tol, int steps,
                        int window, int bins):
    cdef double[::1] uu = np.array(u, dtype=np.float64, copy=True).ravel()
    cdef double[::1] ww = np.array(w, dtype=np.float64, copy=True).ravel()
    cdef const double[::1] off = np.ascontiguousarray(offsets, dtype=np.float64)
    ar_, ai_, br_, bi_ = _split(ta, tb)
    cdef const double[::1] ar = ar_, ai = ai_, br = br_, bi = bi_
    cdef const double* op = &off[0]
    cdef const double* pa = &ar[0]
    cdef const double* pai = &ai[0]
    cdef const double* pb = &br[0]
    cdef const double* pbi = &bi[0]
    cdef Py_ssize_t nb = off.shape[0]
    counts = np.zeros((bins, bins), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] c = counts
    cdef Py_ssize_t m = uu.shape[0], j, k, r, col
    cdef int s, start = steps - window
    cdef double scale = bins / TWO_PI
    cdef double ux, uy, wx, wy, wt, ut
    with nogil:
        for j in range(m):
            ux = cos(uu[j])
            uy = sin(uu[j])
            wx = cos(ww[j])
            wy = sin(ww[j])
            wt = ww[j]
            ut = uu[j]
            for s in range(steps):
                k = locate(op, nb, ccw(base, wt), tol) - 1
                moebius_z(pa[k], pai[k], pb[k], pbi[k], &ux, &uy)
                moebius_z(pa[k], pai[k], pb[k], pbi[k], &wx, &wy)
                wt = angle_of(wx, wy)
                if s >= start:
                    ut = angle_of(ux, uy)
                    r = <Py_ssize_t>(wt * scale)
                    col = <Py_ssize_t>(ut * scale)
                    if r >= bins:
                        r = bins - 1
                    if col >= bins:
                        col = bins - 1
                    c[r, col] += 1
            if steps > 0:
                uu[j] = angle_of(ux, uy)
                ww[j] = wt
    return np.asarray(uu), np.asarray(ww), counts


cdef inline bint in_span(double lo, double span, double x, double tol) noexcept nogil:
    cdef double d = ccw(lo, x)
    return d <= span + tol or d >= TWO_PI - tol


def step_member(u, w, double base, breaks, lo, span, double tol):
    cdef const double[::1] us = np.ascontiguousarray(np.atleast_1d(u), dtype=np.float64)
    cdef const double[::1] ws = np.ascontiguousarray(np.atleast_1d(w), dtype=np.float64)
    cdef const double[::1] br = np.ascontiguousarray(breaks, dtype=np.float64)
    cdef const double[::1] lo_ = np.ascontiguousarray(lo, dtype=np.float64)
    cdef const double[::1] sp = np.ascontiguousarray(span, dtype=np.float64)
    cdef Py_ssize_t m = us.shape[0], nb = br.shape[0], j, lo_i, hi_i, mid, k, prev, nxt
    cdef double d, nxt_off
    out = np.zeros(m, dtype=bool)
    cdef cnp.npy_bool[::1] o = out
    with nogil:
        for j in range(m):
            d = ccw(base, ws[j])
            lo_i = 0
            hi_i = nb
            while lo_i < hi_i:
                mid = (lo_i + hi_i) >> 1
                if br[mid] <= d:
                    lo_i = mid + 1
                else:
                    hi_i = mid
            k = lo_i - 1
            if k < 0:
                k = nb - 1
            if in_span(lo_[k], sp[k], us[j], tol):
                o[j] = 1
                continue
            if d - br[k] <= tol:
                prev = (k - 1 + nb) % nb
                if in_span(lo_[prev], sp[prev], us[j], tol):
                    o[j] = 1
                    continue
            nxt = (k + 1) % nb
            nxt_off = br[k + 1] if k + 1 < nb else TWO_PI + br[0]
            if nxt_off - d <= tol and in_span(lo_[nxt], sp[nxt], us[j], tol):
                o[j] = 1
    return out
