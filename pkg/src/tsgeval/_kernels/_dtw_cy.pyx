# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled dependent-DTW kernels."""

import numpy as np

from cython.parallel cimport prange
from libc.math cimport sqrt, INFINITY
from libc.stdlib cimport malloc, free


cdef inline double _step_cost(const double[:, ::1] a, const double[:, ::1] b,
                              Py_ssize_t i, Py_ssize_t j) noexcept nogil:
    cdef Py_ssize_t d
    cdef double s = 0.0, diff
    for d in range(a.shape[1]):
        diff = a[i, d] - b[j, d]
        s = s + diff * diff
    return sqrt(s)


cdef double _dtw_one(const double[:, ::1] a, const double[:, ::1] b,
                     double* prev, double* cur) noexcept nogil:
    cdef Py_ssize_t n1 = a.shape[0], n2 = b.shape[0]
    cdef Py_ssize_t i, j
    cdef double best
    cdef double* tmp
    prev[0] = 0.0
    for j in range(1, n2 + 1):
        prev[j] = INFINITY
    for i in range(1, n1 + 1):
        cur[0] = INFINITY
        for j in range(1, n2 + 1):
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = _step_cost(a, b, i - 1, j - 1) + best
        tmp = prev
        prev = cur
        cur = tmp
    return prev[n2]


def dtw_window(const double[:, ::1] a, const double[:, ::1] b):
    """DTW between two (length, dims) windows."""
    if a.shape[1] != b.shape[1]:
        raise ValueError("dimension mismatch")
    cdef Py_ssize_t n2 = b.shape[0]
    cdef double* prev = <double*> malloc((n2 + 1) * sizeof(double))
    cdef double* cur = <double*> malloc((n2 + 1) * sizeof(double))
    cdef double out
    if prev == NULL or cur == NULL:
        free(prev)
        free(cur)
        raise MemoryError()
    try:
        with nogil:
            out = _dtw_one(a, b, prev, cur)
    finally:
        free(prev)
        free(cur)
    return out


def dtw_pairs(const double[:, :, ::1] a, const double[:, :, ::1] b, int n_threads=0):
    """DTW for each aligned pair ``(a[p], b[p])``; returns an array of length P."""
    if a.shape[0] != b.shape[0] or a.shape[2] != b.shape[2]:
        raise ValueError("pair count or dimension mismatch")
    cdef Py_ssize_t n_pairs = a.shape[0], n2 = b.shape[1], p
    out_arr = np.empty(n_pairs, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double* scratch
    cdef int threads = n_threads
    if threads <= 0:
        threads = 1
    # each pair owns its scratch rows, so the reduction order never depends on scheduling
    for p in prange(n_pairs, nogil=True, schedule="static", num_threads=threads):
        scratch = <double*> malloc(2 * (n2 + 1) * sizeof(double))
        out[p] = _dtw_one(a[p], b[p], scratch, scratch + n2 + 1)
        free(scratch)
    return out_arr
