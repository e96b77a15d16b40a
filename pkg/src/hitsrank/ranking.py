"""Rank-convergence measurement: weak top-k sets, limit sets and convergence steps.

A vertex is in the weak top-k when fewer than ``k`` vertices score strictly
higher, so every tie at the boundary is included.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .engine import PebbleTrace, ScoreTrace, dominant_eigenvector_per_component
from .errors import DegenerateScoreVector, HitsRankError, HorizonTooShort, InvalidParameter
from .graph import GammaGraph


@dataclass(frozen=True)
class TopKSet:
    k: int
    members: frozenset
    snapshot: object = None  # timestep, or "limit"

    def __len__(self):
        return len(self.members)

    def __contains__(self, v):
        return v in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def mask(self, n):
        m = np.zeros(n, dtype=np.uint8)
        m[list(self.members)] = 1
        return m


def _check_k(k):
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k <= 0:
        raise InvalidParameter(f"k must be a positive integer, got {k!r}")


def kth_largest(scores, k):
    """``min(k, N)``-th largest entry, counting multiplicity. Exact for Python ints."""
    n = len(scores)
    k = min(k, n)
    if isinstance(scores, np.ndarray) and scores.dtype.kind == "f":
        return scores[np.argpartition(scores, n - k)[n - k]]
    return sorted(scores, reverse=True)[k - 1]


def weak_top_k(scores, k, snapshot=None):
    """``{i : |{j : s_j > s_i}| < k}``.

    Equivalently, every entry at least as large as the k-th largest score.
    """
    _check_k(k)
    if len(scores) == 0:
        raise InvalidParameter("score vector is empty")
    thr = kth_largest(scores, k)
    if isinstance(scores, np.ndarray):
        members = frozenset(np.flatnonzero(scores >= thr).tolist())
    else:
        members = frozenset(i for i, s in enumerate(scores) if s >= thr)
    return TopKSet(int(k), members, snapshot)


def boundary_gap(scores, k):
    """Relative gap between the weakest member and the strongest non-member.

    ``inf`` when every vertex is a member.
    """
    thr = kth_largest(scores, k)
    below = [s for s in scores if s < thr]
    if not below:
        return float("inf")
    best = max(below)
    return float((thr - best) / thr) if thr else float("inf")


def _limit_winner(graph):
    if isinstance(graph, GammaGraph):
        return graph.graph, graph.v(0)
    return graph, None


def limit_top_k(graph, k, tol=1e-12):
    """Weak top-k of the eventual score vector.

    For a GammaGraph the full component is taken as the winner even when its
    Perron eigenvalue is numerically indistinguishable from the copies' (it
    strictly contains each copy), and the result must lie inside it.
    """
    _check_k(k)
    g, winner_vertex = _limit_winner(graph)
    eig = dominant_eigenvector_per_component(g, tol, winner_vertex=winner_vertex)
    top = weak_top_k(eig.limit, k, snapshot="limit")
    if isinstance(graph, GammaGraph):
        outside = [v for v in top.members if v not in graph.bar_range]
        if outside:
            raise HitsRankError(f"limit top-{k} contains vertices outside the full component: {outside}")
    return top


@dataclass
class ConvergenceReport:
    """Outcome of a horizon-approximated rank-convergence measurement.

    ``tau`` is ``None`` when the run never holds ``h`` limit-set members through
    the horizon; ``tau_lower_bound`` is then ``horizon + 1``.
    """

    k: int
    h: int
    tau: int | None
    horizon: int
    limit_set: TopKSet
    overlap: list = field(repr=False)
    stable_window: int = 0
    approximated: bool = True
    extra: dict = field(default_factory=dict)

    @property
    def converged(self):
        return self.tau is not None

    @property
    def tau_lower_bound(self):
        return self.tau if self.tau is not None else self.horizon + 1

    def to_dict(self):
        d = {
            "k": self.k,
            "h": self.h,
            "tau": self.tau,
            "horizon": self.horizon,
            "approximated": self.approximated,
            "converged": self.converged,
            "tau_lower_bound": self.tau_lower_bound,
            "stable_window": self.stable_window,
            "limit_set": sorted(self.limit_set.members),
            "overlap": [int(x) for x in self.overlap],
        }
        d.update(self.extra)
        return d


def _rows(trace):
    if isinstance(trace, ScoreTrace):
        return trace.scores
    if isinstance(trace, PebbleTrace):
        return trace.counts
    raise TypeError(f"not a trace: {type(trace).__name__}")


def overlap_series(trace, k, reference):
    """``|T^t_k ∩ reference|`` for every recorded step."""
    ref = reference.members if isinstance(reference, TopKSet) else frozenset(reference)
    return [len(weak_top_k(row, k).members & ref) for row in _rows(trace)]


def _tau_from_exits(last_exit, limit_members, h, horizon):
    exits = sorted(int(last_exit[v]) for v in limit_members)
    if h > len(exits) or exits[h - 1] >= horizon:
        return None
    return exits[h - 1] + 1


def _report(k, h, last_exit, overlap, limit_set, horizon, raise_if_short):
    if h > len(limit_set):
        tau = None
    else:
        tau = _tau_from_exits(last_exit, limit_set.members, h, horizon)
        if tau is None and raise_if_short:
            raise HorizonTooShort(
                f"only {overlap[-1]} of the limit top-{k} are in the top-{k} at t={horizon} "
                f"(need {h}); raise the horizon"
            )
    window = horizon - tau + 1 if tau is not None else 0
    return ConvergenceReport(k, h, tau, horizon, limit_set, list(overlap), window)


def _check_kh(k, h):
    _check_k(k)
    _check_k(h)
    if h > k:
        raise InvalidParameter(f"h={h} must not exceed k={k}")


def convergence_tau(trace, k, h, limit_set, *, raise_if_short=True):
    """Smallest ``tau`` whose suffix intersection of weak top-k sets holds ``h`` limit members.

    The infinite tail is replaced by steps ``tau .. horizon`` intersected with
    ``limit_set``. Raises HorizonTooShort when even the last step holds fewer
    than ``h`` limit members, unless ``raise_if_short`` is false, in which case
    the report carries ``tau=None``.
    """
    _check_kh(k, h)
    rows = _rows(trace)
    horizon = len(rows) - 1
    if horizon < 0:
        raise InvalidParameter("empty trace")
    n = len(rows[0])
    last_exit = [-1] * n
    overlap = []
    ref = limit_set.members
    for t, row in enumerate(rows):
        top = weak_top_k(row, k).members
        for v in range(n):
            if v not in top:
                last_exit[v] = t
        overlap.append(len(top & ref))
    return _report(k, h, last_exit, overlap, limit_set, horizon, raise_if_short)


def measure_convergence(graph, k, h, horizon, limit_set=None, *, tol=1e-12,
                        raise_if_short=True, backend=None):
    """Streamed float-engine variant of convergence_tau; nothing is stored per step.

    ``graph`` may be a GammaGraph, in which case the limit set defaults to its
    structurally resolved limit.
    """
    _check_kh(k, h)
    if horizon < 0:
        raise InvalidParameter("horizon must be >= 0")
    if limit_set is None:
        limit_set = limit_top_k(graph, k, tol)
    g = graph.graph if isinstance(graph, GammaGraph) else graph
    in_ptr, in_idx = g.in_csr()
    out_ptr, out_idx = g.out_csr()
    ref = limit_set.mask(g.num_vertices)
    last_exit, overlap, _, bad = kernels.rank_scan(
        in_ptr, in_idx, out_ptr, out_idx, g.num_vertices, horizon, k, ref, backend=backend
    )
    if bad >= 0:
        raise DegenerateScoreVector(f"score vector vanished at timestep {bad}")
    return _report(k, h, last_exit, overlap.tolist(), limit_set, horizon, raise_if_short)
