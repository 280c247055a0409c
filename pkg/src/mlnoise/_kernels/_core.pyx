# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: radix-2 FFT, Davies-Harte row synthesis, lagged products.

All entry points release the GIL and touch only the rows they are given, so
callers may run them from several threads on disjoint row slices.
"""

from libc.stdlib cimport malloc, free
from libc.math cimport sqrt

import numpy as np


cdef void _bitrev(double complex* a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j = 0, bit
    cdef double complex tmp
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j ^= bit
        if i < j:
            tmp = a[i]
            a[i] = a[j]
            a[j] = tmp


cdef void _fft(double complex* a, Py_ssize_t n, const double complex* tw, bint inverse) noexcept nogil:
    cdef Py_ssize_t size, half, step, start, j, k
    cdef double complex w, u, v
    cdef double scale
    _bitrev(a, n)
    size = 2
    while size <= n:
        half = size >> 1
        step = n // size
        start = 0
        while start < n:
            for j in range(half):
                w = tw[j * step]
                if inverse:
                    w = w.conjugate()
                k = start + j
                u = a[k]
                v = a[k + half] * w
                a[k] = u + v
                a[k + half] = u - v
            start += size
        size <<= 1
    if inverse:
        scale = 1.0 / n
        for j in range(n):
            a[j] = a[j] * scale


def fft_rows(double complex[:, ::1] a, const double complex[::1] tw, bint inverse):
    """In-place transform of every row of ``a`` (row length a power of two)."""
    cdef Py_ssize_t r, n = a.shape[1]
    with nogil:
        for r in range(a.shape[0]):
            _fft(&a[r, 0], n, &tw[0], inverse)


def synthesize_rows(const double[:, ::1] z, const double[::1] amp, const double complex[::1] tw,
                    double[:, ::1] out):
    """Davies-Harte synthesis of ``out.shape[0]`` sequences.

    ``z`` holds 2*T_opt standard normals per row and ``amp`` the amplitudes
    sqrt(2 T_opt A_k) at k = 0, T_opt and sqrt(T_opt A_k) elsewhere.
    """
    cdef Py_ssize_t m = z.shape[1], h = m // 2, t_out = out.shape[1]
    cdef Py_ssize_t r, k
    cdef double complex* y
    with nogil:
        y = <double complex*> malloc(m * sizeof(double complex))
        if y == NULL:
            with gil:
                raise MemoryError()
        try:
            for r in range(z.shape[0]):
                y[0] = amp[0] * z[r, 0]
                for k in range(1, h):
                    y[k] = amp[k] * (z[r, 2 * k - 1] + 1j * z[r, 2 * k])
                    y[m - k] = y[k].conjugate()
                y[h] = amp[h] * z[r, m - 1]
                _fft(y, m, &tw[0], 1)
                for k in range(t_out):
                    out[r, k] = y[k].real
        finally:
            free(y)


def lagged_sums(const double[:, ::1] xi, const long long[::1] lags, double[:, ::1] out):
    """``out[m, l] = sum_s xi[m, s] * xi[m, s + lags[l]]`` in a fixed order.

    Four interleaved partial sums (combined pairwise) break the serial
    dependency chain; the summation order is still fixed, so results are
    reproducible.
    """
    cdef Py_ssize_t t = xi.shape[1], r, l, s, lag, n, n4
    cdef double a0, a1, a2, a3
    cdef const double* x
    with nogil:
        for r in range(xi.shape[0]):
            x = &xi[r, 0]
            for l in range(lags.shape[0]):
                lag = lags[l]
                n = t - lag
                n4 = n - n % 4
                a0 = 0.0
                a1 = 0.0
                a2 = 0.0
                a3 = 0.0
                for s in range(0, n4, 4):
                    a0 = a0 + x[s] * x[s + lag]
                    a1 = a1 + x[s + 1] * x[s + 1 + lag]
                    a2 = a2 + x[s + 2] * x[s + 2 + lag]
                    a3 = a3 + x[s + 3] * x[s + 3 + lag]
                for s in range(n4, n):
                    a0 = a0 + x[s] * x[s + lag]
                out[r, l] = (a0 + a1) + (a2 + a3)


def cumulative_rows(const double[:, ::1] xi, double[:, ::1] out):
    """``out[m, 0] = 0`` and ``out[m, t+1] = out[m, t] + xi[m, t]``."""
    cdef Py_ssize_t r, s, t = xi.shape[1]
    cdef double acc
    with nogil:
        for r in range(xi.shape[0]):
            acc = 0.0
            out[r, 0] = 0.0
            for s in range(t):
                acc = acc + xi[r, s]
                out[r, s + 1] = acc
