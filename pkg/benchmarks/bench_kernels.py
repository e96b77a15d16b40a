"""Compare the compiled and pure-Python float kernels.

    python benchmarks/bench_kernels.py [--steps 100000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from hitsrank import gamma_from_hkn, limit_top_k
from hitsrank import kernels


def _best(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench(hkn, steps, repeat):
    gamma = gamma_from_hkn(*hkn)
    g = gamma.graph
    in_ptr, in_idx = g.in_csr()
    out_ptr, out_idx = g.out_csr()
    k = gamma.params.k
    ref = limit_top_k(gamma, k).mask(g.num_vertices)
    rows = []
    results = {}
    for name in kernels.available_backends():
        def scan():
            return kernels.rank_scan(in_ptr, in_idx, out_ptr, out_idx, g.num_vertices,
                                     steps, k, ref, backend=name)

        def trace():
            buf = np.empty((min(steps, 5000) + 1, g.num_vertices))
            kernels.score_steps(in_ptr, in_idx, out_ptr, out_idx, buf, backend=name)
            return buf

        t_scan, res = _best(scan, repeat)
        t_trace, buf = _best(trace, repeat)
        results[name] = (res, buf)
        rows.append((name, t_scan, t_trace))
    if len(results) == 2:
        (a, ba), (b, bb) = results.values()
        same = np.array_equal(a[0], b[0]) and np.array_equal(a[2], b[2]) and np.array_equal(ba, bb)
    else:
        same = None
    return g.num_vertices, rows, same


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    print(f"selected backend: {kernels.BACKEND}")
    print(f"{'instance':<14}{'N':>5}  {'backend':<8}{'rank_scan s':>12}{'score_steps s':>15}")
    for hkn in [(8, 13, 7), (8, 13, 15), (13, 25, 9)]:
        n, rows, same = bench(hkn, args.steps, args.repeat)
        for name, t_scan, t_trace in rows:
            print(f"{str(hkn):<14}{n:>5}  {name:<8}{t_scan:>12.3f}{t_trace:>15.3f}")
        if len(rows) == 2:
            print(f"{'':<19}speedup {rows[1][1] / rows[0][1]:.1f}x, bitwise equal: {same}")


if __name__ == "__main__":
    main()
