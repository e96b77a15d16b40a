"""HITS score engines.

Two engines share one clock, the pebble timestep ``t``: HITS iteration ``k``
produces the authority vector at ``t = 2k-1`` and the hub vector at ``t = 2k``.

* ``pebble_run`` is exact: arbitrary-precision integer pebble counts.
* ``hits_float_run`` / ``score_run`` use doubles with L2 normalization after
  every half-step, backed by the compiled kernels when available.
"""

from __future__ import annotations

import csv
import io
import math
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from math import isqrt

import numpy as np

from . import kernels
from .errors import (
    AmbiguousDominance,
    DegenerateScoreVector,
    DigitCapExceeded,
    HitsRankError,
    InvalidParameter,
    NotSymmetric,
)

DEFAULT_EXACT_MAX_STEPS = 5_000
DEFAULT_FLOAT_MAX_STEPS = 100_000
DEFAULT_MAX_DIGITS = 100_000
AMBIGUITY_RTOL = 1e-9


@contextmanager
def unlimited_int_digits():
    """Lift the interpreter's int/str conversion digit limit for huge counts."""
    get = getattr(sys, "get_int_max_str_digits", None)
    if get is None:
        yield
        return
    old = get()
    sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(old)


def normalize_exact(counts):
    """Unit-L2 float vector from exact nonnegative integers, correctly scaled.

    Works for counts far beyond the double range: the norm is taken with an
    integer square root carrying 64 guard bits, and each entry is a correctly
    rounded integer quotient.
    """
    counts = [int(c) for c in counts]
    sq = sum(c * c for c in counts)
    if sq == 0:
        raise DegenerateScoreVector("all counts are zero")
    root = isqrt(sq << 128)
    return np.array([(c << 64) / root for c in counts], dtype=np.float64)


@dataclass(frozen=True, eq=False)
class PebbleTrace:
    """Exact pebble counts ``counts[t][v]`` for ``t = 0 .. horizon``."""

    graph: object
    counts: tuple

    @property
    def horizon(self):
        return len(self.counts) - 1

    def __getitem__(self, key):
        t, v = key
        return self.counts[t][v]

    def row(self, t):
        return self.counts[t]

    def total(self, t):
        return sum(self.counts[t])

    def normalized(self, t):
        return normalize_exact(self.counts[t])

    def max_digits(self, t=None):
        row = self.counts[self.horizon if t is None else t]
        if not row:
            return 0
        with unlimited_int_digits():
            return len(str(max(row)))


@dataclass(frozen=True, eq=False)
class ScoreTrace:
    """Unit-L2 score vectors ``scores[t]`` at pebble timesteps ``t = 0 .. horizon``.

    Row 0 is the normalized all-ones start.
    """

    graph: object
    scores: np.ndarray

    @property
    def horizon(self):
        return self.scores.shape[0] - 1

    @property
    def iterations(self):
        return self.horizon // 2

    def row(self, t):
        return self.scores[t]

    def authority(self, k):
        """Authority vector ``a^(k)`` (timestep ``2k-1``)."""
        if k < 1:
            raise InvalidParameter("authority vectors start at iteration 1")
        return self.scores[2 * k - 1]

    def hub(self, k):
        """Hub vector ``h^(k)`` (timestep ``2k``); ``k = 0`` is the start vector."""
        return self.scores[2 * k]


def _check_graph(graph):
    if graph.num_vertices == 0:
        raise InvalidParameter("graph has no vertices")


def pebble_run(graph, T, *, max_steps=DEFAULT_EXACT_MAX_STEPS, max_digits=DEFAULT_MAX_DIGITS):
    """Simulate the pebble process exactly for ``T`` timesteps.

    Step ``t`` (1-based) follows out-arcs when odd, so each vertex collects its
    in-neighbors' pebbles, and in-arcs when even. On symmetric graphs both
    parities are the same neighbor sum.

    Raises DigitCapExceeded when ``T`` exceeds ``max_steps`` or any count would
    need more than ``max_digits`` decimal digits.
    """
    _check_graph(graph)
    if T < 0:
        raise InvalidParameter(f"T must be >= 0, got {T}")
    if T > max_steps:
        raise DigitCapExceeded(f"T={T} exceeds the exact-engine step cap {max_steps}")
    limit = 10 ** max_digits
    by_parity = (graph.out_neighbors, graph.in_neighbors)
    row = [1] * graph.num_vertices
    rows = [tuple(row)]
    for t in range(1, T + 1):
        nbrs = by_parity[t & 1]
        get = row.__getitem__
        row = [sum(map(get, nb)) for nb in nbrs]
        if max(row) >= limit:
            raise DigitCapExceeded(
                f"pebble counts exceed {max_digits} digits at t={t}; lower T or raise the cap"
            )
        rows.append(tuple(row))
    return PebbleTrace(graph, tuple(rows))


def score_run(graph, steps, *, max_steps=DEFAULT_FLOAT_MAX_STEPS, backend=None):
    """Normalized float scores for pebble timesteps ``0 .. steps``."""
    _check_graph(graph)
    if steps < 0:
        raise InvalidParameter(f"steps must be >= 0, got {steps}")
    if steps > max_steps:
        raise DigitCapExceeded(f"steps={steps} exceeds the float-engine step cap {max_steps}")
    in_ptr, in_idx = graph.in_csr()
    out_ptr, out_idx = graph.out_csr()
    scores = np.empty((steps + 1, graph.num_vertices), dtype=np.float64)
    bad = kernels.score_steps(in_ptr, in_idx, out_ptr, out_idx, scores, backend=backend)
    if bad >= 0:
        raise DegenerateScoreVector(f"score vector vanished at timestep {bad}")
    return ScoreTrace(graph, scores)


def hits_float_run(graph, iterations, *, max_steps=DEFAULT_FLOAT_MAX_STEPS, backend=None):
    """Run ``iterations`` HITS iterations: authority then hub, each L2-normalized."""
    if iterations < 1:
        raise InvalidParameter(f"iterations must be >= 1, got {iterations}")
    return score_run(graph, 2 * iterations, max_steps=max_steps, backend=backend)


def power_by_squaring(graph, p, counter=None):
    """Unit vector along ``A^p 1`` from the square chain ``A, A^2, A^4, ...``.

    Each square and each partial product is rescaled by its largest entry.
    ``counter``, when given, receives the number of squarings and of
    matrix-matrix multiplies spent on the partial product.
    """
    _check_graph(graph)
    if not graph.is_symmetric:
        raise NotSymmetric("the squaring accelerator only handles undirected graphs")
    if p < 0:
        raise InvalidParameter(f"p must be >= 0, got {p}")
    squarings = multiplies = 0
    N = graph.num_vertices
    if p == 0:
        vec = np.ones(N)
    else:
        square = graph.adjacency_matrix()
        product = None
        bits = p
        while True:
            if bits & 1:
                if product is None:
                    product = square.copy()
                else:
                    product = product @ square
                    multiplies += 1
                    product /= product.max()
            bits >>= 1
            if not bits:
                break
            square = square @ square
            squarings += 1
            square /= square.max()
        vec = product.sum(axis=1)
    if counter is not None:
        counter["squarings"] = squarings
        counter["multiplies"] = multiplies
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise DegenerateScoreVector(f"A^{p} 1 is the zero vector")
    return vec / norm


@dataclass(frozen=True)
class ComponentSpectrum:
    vertices: tuple
    eigenvalue: float
    vector: np.ndarray
    iterations: int


@dataclass(frozen=True, eq=False)
class DominantEigen:
    """Per-component Perron pairs plus the limit score vector of the whole graph."""

    components: tuple
    winner: int
    limit: np.ndarray
    resolved_by: str

    @property
    def eigenvalues(self):
        return [c.eigenvalue for c in self.components]


def neighbor_table(graph, vertices=None):
    """Padded ``(n, maxdeg)`` table of ascending neighbor positions.

    Empty slots point at position ``n``, a zero sentinel appended to the vector,
    so column-by-column sums add neighbors in ascending order for every row.
    """
    if vertices is None:
        vertices = range(graph.num_vertices)
    pos = {v: p for p, v in enumerate(vertices)}
    rows = [[pos[u] for u in graph.out_neighbors[v] if u in pos] for v in vertices]
    width = max((len(r) for r in rows), default=0)
    table = np.full((len(rows), width), len(rows), dtype=np.int64)
    for p, r in enumerate(rows):
        table[p, : len(r)] = r
    return table


def _matvec(table, x):
    ext = np.append(x, 0.0)
    y = np.zeros(len(x))
    for col in range(table.shape[1]):
        y += ext[table[:, col]]
    return y


def _perron_pair(table, tol, max_iter, shift=1.0):
    # shifted iteration: A + I breaks the +/- lambda tie of bipartite components;
    # ascending-order sums keep automorphic vertices bitwise tied
    n = table.shape[0]
    x = np.full(n, 1.0 / math.sqrt(n))
    if table.shape[1] == 0:
        return 0.0, x, 0
    for it in range(1, max_iter + 1):
        y = _matvec(table, x) + shift * x
        y /= np.linalg.norm(y)
        if np.linalg.norm(y - x) <= tol:
            x = y
            break
        x = y
    else:
        raise HitsRankError(f"power iteration did not reach tol={tol} in {max_iter} iterations")
    return float(x @ _matvec(table, x)), x, it


def dominant_eigenvector_per_component(graph, tol=1e-12, *, winner_vertex=None,
                                       max_iter=1_000_000):
    """Perron eigenvalue and unit eigenvector of each connected component.

    The limit vector puts the winning component's eigenvector in place and zero
    elsewhere. The winner is the component with the strictly largest
    eigenvalue; if the top two are within a relative ``1e-9`` the call raises
    AmbiguousDominance unless ``winner_vertex`` names the component to use
    (for Gamma graphs the full component wins on structural grounds).
    """
    _check_graph(graph)
    if not graph.is_symmetric:
        raise NotSymmetric("per-component Perron vectors need an undirected graph")
    if tol <= 0:
        raise InvalidParameter("tol must be positive")
    comps = []
    for verts in graph.components:
        lam, vec, its = _perron_pair(neighbor_table(graph, verts), tol, max_iter)
        comps.append(ComponentSpectrum(tuple(verts), lam, vec, its))
    order = sorted(range(len(comps)), key=lambda c: -comps[c].eigenvalue)
    best = order[0]
    resolved = "strict"
    if len(comps) > 1:
        top, second = comps[order[0]].eigenvalue, comps[order[1]].eigenvalue
        close = abs(top - second) < AMBIGUITY_RTOL * max(abs(top), 1e-300)
        if winner_vertex is not None:
            chosen = next(c for c, s in enumerate(comps) if winner_vertex in s.vertices)
            lam = comps[chosen].eigenvalue
            if chosen != best and abs(top - lam) >= AMBIGUITY_RTOL * abs(top):
                raise HitsRankError(
                    f"requested winner has eigenvalue {lam!r}, clearly below the maximum {top!r}"
                )
            if chosen != best or close:
                resolved = "caller"
            best = chosen
        elif close:
            raise AmbiguousDominance(
                f"top component eigenvalues {top!r} and {second!r} differ by less than "
                f"{AMBIGUITY_RTOL:g} relative",
                eigenvalues=[c.eigenvalue for c in comps],
            )
    limit = np.zeros(graph.num_vertices)
    win = comps[best]
    limit[list(win.vertices)] = win.vector
    return DominantEigen(tuple(comps), best, limit, resolved)


# ---------------------------------------------------------------------------
# Trace CSV
# ---------------------------------------------------------------------------

def _write_rows(rows, graph, fmt, out):
    close = False
    if isinstance(out, (str, bytes)) or hasattr(out, "__fspath__"):
        out = open(out, "w", newline="", encoding="utf-8")
        close = True
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["t", "vertex", "label", "count"])
        for t, row in enumerate(rows):
            for v, val in enumerate(row):
                w.writerow([t, v, graph.labels[v], fmt(val)])
    finally:
        if close:
            out.close()


def write_trace_csv(trace, out):
    """Long-format CSV ``t,vertex,label,count`` to a path or text stream.

    Exact traces write decimal integers; score traces write 17 significant digits.
    """
    if isinstance(trace, PebbleTrace):
        with unlimited_int_digits():
            _write_rows(trace.counts, trace.graph, str, out)
    elif isinstance(trace, ScoreTrace):
        _write_rows(trace.scores, trace.graph, lambda x: format(float(x), ".17g"), out)
    else:
        raise TypeError(f"not a trace: {type(trace).__name__}")


def trace_csv_text(trace):
    buf = io.StringIO()
    write_trace_csv(trace, buf)
    return buf.getvalue()
