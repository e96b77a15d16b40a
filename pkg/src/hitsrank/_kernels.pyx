# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled float kernels: normalized half-steps and streaming weak top-k scans.

Neighbor sums run in ascending neighbor order so symmetric vertices tie bitwise.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


cdef int _half_step(const long long[::1] indptr, const long long[::1] idx,
                    const double[::1] src, double[::1] dst) noexcept nogil:
    cdef Py_ssize_t i, p, n = dst.shape[0]
    cdef double acc, norm = 0.0
    for i in range(n):
        acc = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            acc = acc + src[idx[p]]
        dst[i] = acc
        norm = norm + acc * acc
    if norm == 0.0:
        return -1
    norm = sqrt(norm)
    for i in range(n):
        dst[i] = dst[i] / norm
    return 0


def score_steps(const long long[::1] in_indptr, const long long[::1] in_idx,
                const long long[::1] out_indptr, const long long[::1] out_idx,
                double[:, ::1] out):
    """Fill ``out[t]`` with the unit score vector at pebble timestep ``t``.

    Odd steps sum over in-neighbors (authority), even steps over out-neighbors
    (hub). Returns the first step with a zero vector, or -1.
    """
    cdef Py_ssize_t n = out.shape[1], steps = out.shape[0] - 1, i, t
    cdef int rc
    cdef double x0 = 1.0 / sqrt(<double> n)
    for i in range(n):
        out[0, i] = x0
    with nogil:
        for t in range(1, steps + 1):
            if t & 1:
                rc = _half_step(in_indptr, in_idx, out[t - 1], out[t])
            else:
                rc = _half_step(out_indptr, out_idx, out[t - 1], out[t])
            if rc != 0:
                with gil:
                    return t
    return -1


cdef double _kth_largest(const double[::1] x, Py_ssize_t k, double[::1] top) noexcept nogil:
    # top[0..filled) holds the largest values seen so far, descending
    cdef Py_ssize_t i, j, filled = 0, n = x.shape[0]
    cdef double v
    if k > n:
        k = n
    for i in range(n):
        v = x[i]
        if filled < k:
            j = filled
            filled += 1
        elif v > top[k - 1]:
            j = k - 1
        else:
            continue
        while j > 0 and top[j - 1] < v:
            top[j] = top[j - 1]
            j -= 1
        top[j] = v
    return top[k - 1]


def rank_scan(const long long[::1] in_indptr, const long long[::1] in_idx,
              const long long[::1] out_indptr, const long long[::1] out_idx,
              Py_ssize_t n, Py_ssize_t steps, Py_ssize_t k,
              const unsigned char[::1] reference):
    """Stream the score iteration without storing it.

    Returns ``(last_exit, overlap, final, degenerate_step)``: for each vertex the
    last step at which it was outside the weak top-k (-1 if never), per-step
    overlap of the weak top-k with ``reference``, the final unit vector, and the
    first zero-vector step (-1 if none).
    """
    cdef cnp.ndarray[cnp.int64_t, ndim=1] last_exit_a = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] overlap_a = np.zeros(steps + 1, dtype=np.int64)
    cdef long long[::1] last_exit = last_exit_a
    cdef long long[::1] overlap = overlap_a
    cdef double[::1] cur = np.empty(n, dtype=np.float64)
    cdef double[::1] nxt = np.empty(n, dtype=np.float64)
    cdef double[::1] top = np.empty(max(k, 1), dtype=np.float64)
    cdef double[::1] tmp
    cdef double thr, x0 = 1.0 / sqrt(<double> n)
    cdef Py_ssize_t i, t
    cdef long long ov
    cdef int rc = 0
    cdef long long bad = -1
    for i in range(n):
        cur[i] = x0
    with nogil:
        for t in range(steps + 1):
            if t > 0:
                if t & 1:
                    rc = _half_step(in_indptr, in_idx, cur, nxt)
                else:
                    rc = _half_step(out_indptr, out_idx, cur, nxt)
                if rc != 0:
                    bad = t
                    break
                tmp = cur
                cur = nxt
                nxt = tmp
            thr = _kth_largest(cur, k, top)
            ov = 0
            for i in range(n):
                if cur[i] >= thr:
                    ov += reference[i]
                else:
                    last_exit[i] = t
            overlap[t] = ov
    return last_exit_a, overlap_a, np.asarray(cur).copy(), bad
