"""Pure-Python/numpy twins of the compiled kernels in ``_kernels.pyx``.

Same signatures and results, bit for bit. Neighbor sums are taken column by
column over a padded neighbor table, which keeps the ascending per-vertex
summation order of the compiled loops.
"""

import numpy as np


def _padded(indptr, idx, n):
    """``(n, maxdeg)`` neighbor table; missing slots point at a zero sentinel ``n``."""
    deg = np.diff(indptr)
    width = int(deg.max()) if n else 0
    table = np.full((n, width), n, dtype=np.int64)
    for i in range(n):
        table[i, : deg[i]] = idx[indptr[i]:indptr[i + 1]]
    return table


def _half_step(table, src_ext, dst):
    # src_ext[-1] is the zero sentinel
    dst[:] = 0.0
    for col in range(table.shape[1]):
        dst += src_ext[table[:, col]]
    # cumsum accumulates left to right, matching the compiled loop bit for bit
    norm = np.sqrt(np.cumsum(dst * dst)[-1])
    if norm == 0.0:
        return -1
    dst /= norm
    return 0


def score_steps(in_indptr, in_idx, out_indptr, out_idx, out):
    steps, n = out.shape[0] - 1, out.shape[1]
    tables = (_padded(out_indptr, out_idx, n), _padded(in_indptr, in_idx, n))
    ext = np.zeros(n + 1)
    out[0, :] = 1.0 / np.sqrt(n)
    for t in range(1, steps + 1):
        ext[:n] = out[t - 1]
        if _half_step(tables[t & 1], ext, out[t]) != 0:
            return t
    return -1


def kth_largest(x, k):
    k = min(k, len(x))
    return np.partition(x, len(x) - k)[len(x) - k]


def rank_scan(in_indptr, in_idx, out_indptr, out_idx, n, steps, k, reference):
    tables = (_padded(out_indptr, out_idx, n), _padded(in_indptr, in_idx, n))
    reference = np.asarray(reference, dtype=bool)
    last_exit = np.full(n, -1, dtype=np.int64)
    overlap = np.zeros(steps + 1, dtype=np.int64)
    ext = np.zeros(n + 1)
    ext[:n] = 1.0 / np.sqrt(n)
    nxt = np.empty(n)
    bad = -1
    for t in range(steps + 1):
        if t > 0:
            if _half_step(tables[t & 1], ext, nxt) != 0:
                bad = t
                break
            ext[:n] = nxt
        cur = ext[:n]
        inside = cur >= kth_largest(cur, k)
        last_exit[~inside] = t
        overlap[t] = np.count_nonzero(inside & reference)
    return last_exit, overlap, ext[:n].copy(), bad
