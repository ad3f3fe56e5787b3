# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in :mod:`apcalc._kernels_py`."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, exp, log, pow, M_PI

cnp.import_array()


def trig_eval(freqs, coeffs, points):
    cdef const double[:, ::1] F = np.ascontiguousarray(freqs, dtype=np.float64)
    cdef const double complex[::1] C = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef const double[:, ::1] P = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t n = F.shape[0], d = F.shape[1], m = P.shape[0]
    out = np.zeros(m, dtype=np.complex128)
    cdef double complex[::1] O = out
    cdef Py_ssize_t i, k, a
    cdef double ph, re, im, cr, ci, c, s
    for i in range(m):
        re = 0.0
        im = 0.0
        for k in range(n):
            ph = 0.0
            for a in range(d):
                ph += F[k, a] * P[i, a]
            ph *= 2.0 * M_PI
            c = cos(ph)
            s = sin(ph)
            cr = C[k].real
            ci = C[k].imag
            re += cr * c - ci * s
            im += cr * s + ci * c
        O[i] = re + 1j * im
    return out


def gs_eval(signs, logc, powers, double a, x):
    cdef const double[::1] S = np.ascontiguousarray(signs, dtype=np.float64)
    cdef const double[::1] L = np.ascontiguousarray(logc, dtype=np.float64)
    cdef const double[::1] Q = np.ascontiguousarray(powers, dtype=np.float64)
    xa = np.asarray(x, dtype=np.float64)
    shape = xa.shape
    cdef const double[::1] X = np.ascontiguousarray(xa.ravel())
    cdef Py_ssize_t n = S.shape[0], m = X.shape[0]
    out = np.zeros(m, dtype=np.float64)
    cdef double[::1] O = out
    cdef Py_ssize_t i, k
    cdef double xv, lx, flat, top, e, acc
    if n == 0:
        return out.reshape(shape)
    for i in range(m):
        xv = X[i]
        if xv <= 0.0:
            continue
        lx = log(xv)
        flat = pow(xv, -a)
        top = -1e308
        for k in range(n):
            e = L[k] + Q[k] * lx - flat
            if e > top:
                top = e
        acc = 0.0
        for k in range(n):
            acc += S[k] * exp(L[k] + Q[k] * lx - flat - top)
        O[i] = acc * exp(top)
    return out.reshape(shape)


def trapezoid_weights(Py_ssize_t n, double length):
    out = np.full(n, length / (n - 1), dtype=np.float64)
    out[0] *= 0.5
    out[n - 1] *= 0.5
    return out
