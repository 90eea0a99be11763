# cython: language_level=3
"""Compiled numeric kernels; see ``_kernels_py`` for the reference versions."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, hypot

cnp.import_array()

ctypedef double complex cplx


def mul1(cplx[::1] a, cplx[::1] b):
    cdef Py_ssize_t n = a.shape[0]
    out = np.zeros(n, dtype=np.complex128)
    cdef cplx[::1] o = out
    cdef Py_ssize_t i, j
    cdef cplx ai
    for i in range(n):
        ai = a[i]
        if ai == 0:
            continue
        for j in range(n - i):
            o[i + j] = o[i + j] + ai * b[j]
    return out


def mul2(cplx[:, ::1] a, cplx[:, ::1] b):
    cdef Py_ssize_t n = a.shape[0]
    out = np.zeros((n, n), dtype=np.complex128)
    cdef cplx[:, ::1] o = out
    cdef Py_ssize_t i, j, k, l
    cdef cplx aij
    for i in range(n):
        for j in range(n - i):
            aij = a[i, j]
            if aij == 0:
                continue
            for k in range(n - i - j):
                for l in range(n - i - j - k):
                    o[i + k, j + l] = o[i + k, j + l] + aij * b[k, l]
    return out


cdef inline void _horner(cplx[::1] c, cplx x, cplx* p, cplx* dp) noexcept:
    cdef Py_ssize_t k
    cdef cplx pp = 0, dd = 0
    for k in range(c.shape[0] - 1, -1, -1):
        dd = dd * x + pp
        pp = pp * x + c[k]
    p[0] = pp
    dp[0] = dd


def horner(cplx[::1] coeffs, cplx x):
    cdef cplx p, dp
    _horner(coeffs, x, &p, &dp)
    return p, dp


cdef inline double _cabs(cplx z) noexcept:
    return hypot(z.real, z.imag)


def aberth_sweep(cplx[::1] coeffs, cplx[::1] roots):
    cdef Py_ssize_t n = roots.shape[0]
    cdef Py_ssize_t i, j
    cdef cplx z, p, dp, ratio, s, d, denom, step
    cdef double worst = 0.0, rel, az
    for i in range(n):
        z = roots[i]
        _horner(coeffs, z, &p, &dp)
        if p == 0:
            continue
        if dp != 0:
            ratio = p / dp
        else:
            ratio = 1e-3 + 1e-3j
        s = 0
        for j in range(n):
            if j != i:
                d = z - roots[j]
                if d != 0:
                    s = s + 1.0 / d
        denom = 1.0 - ratio * s
        if denom != 0:
            step = ratio / denom
        else:
            step = ratio
        roots[i] = z - step
        az = _cabs(z)
        rel = _cabs(step) / (az if az > 1.0 else 1.0)
        if rel > worst:
            worst = rel
    return worst
