# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: pole-sum transmission and the peak/prominence scan."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def pole_sum(const double[::1] f, const double[::1] centers, const double[::1] fwhms,
             const double complex[::1] amps, double baseline, double sign):
    cdef Py_ssize_t n = f.shape[0], k = centers.shape[0], i, j
    cdef double h, x, den, re, im
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    for i in range(n):
        re = 0.0
        im = 0.0
        for j in range(k):
            # a h / (i x + h) = a h (h - i x) / (x^2 + h^2)
            h = 0.5 * fwhms[j]
            x = f[i] - centers[j]
            den = h / (x * x + h * h)
            re += (amps[j].real * h + amps[j].imag * x) * den
            im += (amps[j].imag * h - amps[j].real * x) * den
        o[i].real = baseline + sign * re
        o[i].imag = sign * im
    return out


def pole_sum_abs(const double[::1] f, const double[::1] centers, const double[::1] fwhms,
                 const double complex[::1] amps, double baseline, double sign):
    cdef Py_ssize_t n = f.shape[0], k = centers.shape[0], i, j
    cdef double h, x, den, re, im
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    for i in range(n):
        re = 0.0
        im = 0.0
        for j in range(k):
            h = 0.5 * fwhms[j]
            x = f[i] - centers[j]
            den = h / (x * x + h * h)
            re += (amps[j].real * h + amps[j].imag * x) * den
            im += (amps[j].imag * h - amps[j].real * x) * den
        re = baseline + sign * re
        im = sign * im
        o[i] = sqrt(re * re + im * im)
    return out


def peak_scan(const double[::1] y, double min_prominence):
    cdef Py_ssize_t n = y.shape[0], i, j, k, start
    cdef double top, left_min, right_min, base
    idx = []
    prom = []
    i = 1
    while i < n - 1:
        if y[i] > y[i - 1]:
            start = i
            k = i
            while k + 1 < n and y[k + 1] == y[i]:
                k += 1
            if k + 1 < n and y[k + 1] < y[i]:
                top = y[start]
                left_min = top
                j = start - 1
                while j >= 0 and y[j] <= top:
                    if y[j] < left_min:
                        left_min = y[j]
                    j -= 1
                right_min = top
                j = k + 1
                while j < n and y[j] <= top:
                    if y[j] < right_min:
                        right_min = y[j]
                    j += 1
                base = left_min if left_min > right_min else right_min
                if top - base >= min_prominence:
                    idx.append(start)
                    prom.append(top - base)
            i = k + 1
        else:
            i += 1
    return np.asarray(idx, dtype=np.intp), np.asarray(prom, dtype=np.float64)
