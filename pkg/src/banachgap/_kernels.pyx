# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled nearest-point reductions between point clouds."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow, INFINITY

cnp.import_array()


def row_min_cheb(double[:, ::1] a, double[:, ::1] b):
    """Smallest Chebyshev distance from each row of ``a`` to ``b``, with argmin."""
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0], d = a.shape[1]
    cdef Py_ssize_t i, k, j, kbest
    cdef double best, cur, t
    out = np.empty(n)
    arg = np.zeros(n, dtype=np.intp)
    cdef double[::1] res = out
    cdef Py_ssize_t[::1] ares = arg
    for i in range(n):
        best = INFINITY
        kbest = 0
        for k in range(m):
            cur = 0.0
            for j in range(d):
                t = fabs(a[i, j] - b[k, j])
                if t > cur:
                    cur = t
                    if cur >= best:
                        break
            if cur < best:
                best = cur
                kbest = k
        res[i] = best
        ares[i] = kbest
    return out, arg


def row_min_lp(double[:, ::1] a, double[:, ::1] b, double p):
    """Smallest l_p distance (finite p) from each row of ``a`` to ``b``, with argmin."""
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0], d = a.shape[1]
    cdef Py_ssize_t i, k, j, kbest
    cdef double best, cur, t
    out = np.empty(n)
    arg = np.zeros(n, dtype=np.intp)
    cdef double[::1] res = out
    cdef Py_ssize_t[::1] ares = arg
    for i in range(n):
        best = INFINITY
        kbest = 0
        for k in range(m):
            cur = 0.0
            for j in range(d):
                t = fabs(a[i, j] - b[k, j])
                if p == 1.0:
                    cur += t
                elif p == 2.0:
                    cur += t * t
                else:
                    cur += pow(t, p)
                if cur >= best:
                    break
            if cur < best:
                best = cur
                kbest = k
        res[i] = best
        ares[i] = kbest
    if p == 1.0:
        return out, arg
    return out ** (1.0 / p), arg


def sup_min_cheb(double[:, ::1] a, double[:, ::1] b):
    """``max_i min_k |a_i - b_k|_inf`` with early termination."""
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0], d = a.shape[1]
    cdef Py_ssize_t i, k, j
    cdef double best, cur, t, glob = 0.0
    for i in range(n):
        best = INFINITY
        for k in range(m):
            cur = 0.0
            for j in range(d):
                t = fabs(a[i, j] - b[k, j])
                if t > cur:
                    cur = t
                    if cur >= best:
                        break
            if cur < best:
                best = cur
                if best <= glob:
                    break
        if best > glob:
            glob = best
    return glob
