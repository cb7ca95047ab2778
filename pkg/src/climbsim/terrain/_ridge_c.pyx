# cython: language_level=3
"""Compiled ridge-sum kernel.

Same accumulation order as the numpy fallback: per point, scale terms are
added ridge-major then frequency, so the two backends agree to round-off.
"""

import numpy as np

from libc.math cimport cos, sin


def ridge_sum(double[::1] x, double[::1] y,
              double[::1] cos_ridge, double[::1] sin_ridge,
              double[::1] wavenum, double[::1] decay,
              double[:, ::1] phase, double[:, ::1] cos_phase):
    cdef Py_ssize_t npts = x.shape[0]
    cdef Py_ssize_t nridge = cos_ridge.shape[0]
    cdef Py_ssize_t nfreq = wavenum.shape[0]
    cdef Py_ssize_t p, m, n
    cdef double acc, proj

    out_arr = np.empty(npts, dtype=np.float64)
    cdef double[::1] out = out_arr

    with nogil:
        for p in range(npts):
            acc = 0.0
            for m in range(nridge):
                proj = x[p] * cos_ridge[m] + y[p] * sin_ridge[m]
                for n in range(nfreq):
                    acc += decay[n] * (cos_phase[m, n] - cos(wavenum[n] * proj + phase[m, n]))
            out[p] = acc
    return out_arr


def ridge_sum_grid(double[::1] xs, double[::1] ys,
                   double[::1] cos_ridge, double[::1] sin_ridge,
                   double[::1] wavenum, double[::1] decay,
                   double[:, ::1] phase, double[:, ::1] cos_phase):
    """Lattice evaluation, shape (ny, nx); see the numpy twin for the math.

    The per-element operation order mirrors the numpy implementation, so
    the two backends stay bit-identical (the build disables FP contraction
    to keep it that way).
    """
    cdef Py_ssize_t nx = xs.shape[0]
    cdef Py_ssize_t ny = ys.shape[0]
    cdef Py_ssize_t nridge = cos_ridge.shape[0]
    cdef Py_ssize_t nfreq = wavenum.shape[0]
    cdef Py_ssize_t m, n, i, j
    cdef double wc, ws, angle, d, cphi, cb_i, sb_i

    out_arr = np.zeros((ny, nx), dtype=np.float64)
    cdef double[:, ::1] acc = out_arr
    buf = np.empty((4, max(nx, ny)), dtype=np.float64)
    cdef double[::1] cos_ax = buf[0]
    cdef double[::1] sin_ax = buf[1]
    cdef double[::1] cos_ay = buf[2]
    cdef double[::1] sin_ay = buf[3]

    with nogil:
        for m in range(nridge):
            for n in range(nfreq):
                wc = wavenum[n] * cos_ridge[m]
                ws = wavenum[n] * sin_ridge[m]
                for j in range(nx):
                    angle = wc * xs[j]
                    cos_ax[j] = cos(angle)
                    sin_ax[j] = sin(angle)
                for i in range(ny):
                    angle = ws * ys[i] + phase[m, n]
                    cos_ay[i] = cos(angle)
                    sin_ay[i] = sin(angle)
                d = decay[n]
                cphi = cos_phase[m, n]
                for i in range(ny):
                    cb_i = cos_ay[i]
                    sb_i = sin_ay[i]
                    for j in range(nx):
                        acc[i, j] += d * (cphi - (cos_ax[j] * cb_i - sin_ax[j] * sb_i))
    return out_arr
