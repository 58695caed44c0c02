# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled spin-exchange matvec kernel (hot loop of every Lanczos and
Krylov-propagation step).  Contract matches ``_matvec_py.apply_bonds``."""

import numpy as np

cimport numpy as cnp

ctypedef fused ampl_t:
    double
    double complex


cdef inline Py_ssize_t _bisect(const cnp.int64_t* configs, Py_ssize_t n,
                               cnp.int64_t key) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = n - 1, mid
    while lo <= hi:
        mid = (lo + hi) >> 1
        if configs[mid] < key:
            lo = mid + 1
        elif configs[mid] > key:
            hi = mid - 1
        else:
            return mid
    return -1


def apply_bonds(const cnp.int64_t[::1] configs,
                const cnp.int64_t[::1] bits_a,
                const cnp.int64_t[::1] bits_b,
                const double[::1] strengths,
                ampl_t[::1] v,
                ampl_t[::1] out):
    """out += H v, matrix-free over a sorted sector config array."""
    cdef Py_ssize_t dim = configs.shape[0]
    cdef Py_ssize_t nb = bits_a.shape[0]
    cdef Py_ssize_t k, i, idx
    cdef int a, b
    cdef cnp.int64_t mask, c
    cdef double w
    cdef bint pa, pb
    with nogil:
        for k in range(nb):
            a = <int> bits_a[k]
            b = <int> bits_b[k]
            w = strengths[k]
            mask = (<cnp.int64_t> 1 << a) | (<cnp.int64_t> 1 << b)
            for i in range(dim):
                c = configs[i]
                pa = (c >> a) & 1
                pb = (c >> b) & 1
                if pa == pb:
                    out[i] = out[i] + w * v[i]
                else:
                    out[i] = out[i] - w * v[i]
                    idx = _bisect(&configs[0], dim, c ^ mask)
                    out[idx] = out[idx] + 2.0 * w * v[i]
    return np.asarray(out)
