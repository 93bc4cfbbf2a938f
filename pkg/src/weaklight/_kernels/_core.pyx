# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled fast path for the hot kernels.

Mirrors ``_numpy`` term by term; see that module for the algebra. Keep the
two implementations in lockstep -- tests/test_kernels.py holds them to
1e-13 relative agreement.
"""

import numpy as np

from libc.math cimport cos, sin, sqrt, M_PI


cdef double _SQRT_HALF = sqrt(0.5)


def postselected_density(const double[::1] wavelengths, const double[::1] density,
                         double alpha, double beta, double lambda0,
                         const double[::1] chi=None):
    cdef Py_ssize_t n = wavelengths.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double b = 0.5 * beta - 0.25 * M_PI
    cdef double sb = sin(b)
    cdef double cb = cos(b)
    cdef double half, c1, s1, c2, s2, re, im
    cdef Py_ssize_t i
    for i in range(n):
        half = 0.5 * alpha * lambda0 / wavelengths[i]
        if chi is None:
            c1 = cos(half)
            s1 = -sin(half)
            c2 = c1
            s2 = -s1
        else:
            c1 = cos(chi[i] - half)
            s1 = sin(chi[i] - half)
            c2 = cos(chi[i] + half)
            s2 = sin(chi[i] + half)
        re = (sb * c1 + cb * c2) * _SQRT_HALF
        im = (sb * s1 + cb * s2) * _SQRT_HALF
        out[i] = density[i] * (re * re + im * im)
    return out_arr


def trapezoid_moments(const double[::1] x, const double[::1] y):
    cdef Py_ssize_t n = x.shape[0]
    cdef double pivot = 0.5 * (x[0] + x[n - 1])
    cdef double m0 = 0.0, m1 = 0.0, m2 = 0.0
    cdef double dx, t0, t1, f0, f1
    cdef Py_ssize_t i
    for i in range(n - 1):
        dx = x[i + 1] - x[i]
        t0 = x[i] - pivot
        t1 = x[i + 1] - pivot
        f0 = y[i]
        f1 = y[i + 1]
        m0 += 0.5 * dx * (f0 + f1)
        m1 += 0.5 * dx * (t0 * f0 + t1 * f1)
        m2 += 0.5 * dx * (t0 * t0 * f0 + t1 * t1 * f1)
    if m0 == 0.0:
        return 0.0, pivot, 0.0
    m1 /= m0
    m2 /= m0
    return m0, pivot + m1, m2 - m1 * m1


def spread_ensemble(const double[::1] wavelengths, const double[::1] density,
                    double alpha, double lambda0, const double[::1] betas,
                    const double[::1] chi=None):
    cdef Py_ssize_t n = wavelengths.shape[0]
    cdef Py_ssize_t m = betas.shape[0]
    probs_arr = np.empty(m, dtype=np.float64)
    cents_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] probs = probs_arr
    cdef double[::1] cents = cents_arr
    c1_arr = np.empty(n, dtype=np.float64)
    s1_arr = np.empty(n, dtype=np.float64)
    c2_arr = np.empty(n, dtype=np.float64)
    s2_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] c1 = c1_arr
    cdef double[::1] s1 = s1_arr
    cdef double[::1] c2 = c2_arr
    cdef double[::1] s2 = s2_arr
    cdef double pivot = 0.5 * (wavelengths[0] + wavelengths[n - 1])
    cdef double half, b, sb, cb, re, im, f0, f1, tf0, tf1, dx, m0, m1
    cdef Py_ssize_t i, j
    for i in range(n):
        half = 0.5 * alpha * lambda0 / wavelengths[i]
        if chi is None:
            c1[i] = cos(half)
            s1[i] = -sin(half)
            c2[i] = c1[i]
            s2[i] = -s1[i]
        else:
            c1[i] = cos(chi[i] - half)
            s1[i] = sin(chi[i] - half)
            c2[i] = cos(chi[i] + half)
            s2[i] = sin(chi[i] + half)
    for j in range(m):
        b = 0.5 * betas[j] - 0.25 * M_PI
        sb = sin(b)
        cb = cos(b)
        m0 = 0.0
        m1 = 0.0
        re = (sb * c1[0] + cb * c2[0]) * _SQRT_HALF
        im = (sb * s1[0] + cb * s2[0]) * _SQRT_HALF
        f0 = density[0] * (re * re + im * im)
        tf0 = (wavelengths[0] - pivot) * f0
        for i in range(n - 1):
            re = (sb * c1[i + 1] + cb * c2[i + 1]) * _SQRT_HALF
            im = (sb * s1[i + 1] + cb * s2[i + 1]) * _SQRT_HALF
            f1 = density[i + 1] * (re * re + im * im)
            tf1 = (wavelengths[i + 1] - pivot) * f1
            dx = wavelengths[i + 1] - wavelengths[i]
            m0 += 0.5 * dx * (f0 + f1)
            m1 += 0.5 * dx * (tf0 + tf1)
            f0 = f1
            tf0 = tf1
        probs[j] = m0
        cents[j] = pivot + m1 / m0 if m0 > 0.0 else pivot
    return probs_arr, cents_arr


def spread_mixture(const double[::1] wavelengths, const double[::1] density,
                   double alpha, double lambda0, const double[::1] betas,
                   const double[::1] coeffs, const double[::1] chi=None):
    cdef Py_ssize_t n = wavelengths.shape[0]
    cdef Py_ssize_t m = betas.shape[0]
    out_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    sb_arr = np.empty(m, dtype=np.float64)
    cb_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] sb = sb_arr
    cdef double[::1] cb = cb_arr
    cdef double half, b, c1, s1, c2, s2, re, im, acc
    cdef Py_ssize_t i, j
    for j in range(m):
        b = 0.5 * betas[j] - 0.25 * M_PI
        sb[j] = sin(b)
        cb[j] = cos(b)
    for i in range(n):
        half = 0.5 * alpha * lambda0 / wavelengths[i]
        if chi is None:
            c1 = cos(half)
            s1 = -sin(half)
            c2 = c1
            s2 = -s1
        else:
            c1 = cos(chi[i] - half)
            s1 = sin(chi[i] - half)
            c2 = cos(chi[i] + half)
            s2 = sin(chi[i] + half)
        acc = 0.0
        for j in range(m):
            re = (sb[j] * c1 + cb[j] * c2) * _SQRT_HALF
            im = (sb[j] * s1 + cb[j] * s2) * _SQRT_HALF
            acc += coeffs[j] * (re * re + im * im)
        out[i] = density[i] * acc
    return out_arr
