"""Exact checks of the growth lemmas and lower-bound checkpoints on Gamma pebble traces.

Every trace-side comparison is done on exact integers by cross-multiplication.
Irrational constants are evaluated with interval arithmetic (mpmath) and the
endpoint that makes a "pass" conservative is used.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import iv

from .engine import unlimited_int_digits
from .errors import HorizonTooShort, InvalidParameter, NotGammaGraph
from .graph import GammaParams
from .ranking import weak_top_k

FORMAT_VERSION = 1
_PREC_BITS = 80


# ---------------------------------------------------------------------------
# Constants and theorem quantities
# ---------------------------------------------------------------------------

def _interval(fn, prec=_PREC_BITS):
    old = iv.prec
    iv.prec = prec
    try:
        return fn()
    finally:
        iv.prec = old


def _t_bar_iv(m, n, prec=_PREC_BITS):
    def calc():
        base = iv.mpf(m) / 2
        return 3 * iv.log(iv.mpf(7) / 6) / (4 * iv.e) * base ** ((n - 1) // 2)
    return _interval(calc, prec)


def _tau_tilde_iv(m, n):
    return _interval(lambda: 3 / (4 * iv.e) * (iv.mpf(m) / 2) ** ((n - 1) // 2))


def _running_bound_iv(m, n):
    return _interval(lambda: iv.e * (iv.mpf(2) / m) ** ((n - 1) // 2))


def _endpoints(x):
    """Exact rational endpoints ``(lower, upper)`` of an interval."""
    out = []
    for sign, man, exp, _ in x._mpi_:
        val = Fraction(int(man) << exp) if exp >= 0 else Fraction(int(man), 1 << -exp)
        out.append(-val if sign else val)
    return tuple(out)


def _floor_iv(x):
    lo, hi = (v.__floor__() for v in _endpoints(x))
    if lo != hi:
        raise ArithmeticError("interval straddles an integer; raise the working precision")
    return lo


def _t_bar_floor(m, n):
    # large t_bar needs more bits than the default to pin down its integer part
    prec = _PREC_BITS
    while prec <= 1 << 16:
        try:
            return _floor_iv(_t_bar_iv(m, n, prec))
        except ArithmeticError:
            prec *= 2
    raise ArithmeticError(f"could not isolate floor(t_bar) for m={m}, n={n}")


def _mid(x):
    lo, hi = _endpoints(x)
    return float((lo + hi) / 2)


@dataclass(frozen=True)
class TheoremQuantities:
    """Lower-bound horizon ``t_bar``, its scale ``tau_tilde`` and the checkpoint window."""

    params: object
    t_bar: float
    tau_tilde: float
    t_bar_floor: int
    window: tuple

    @property
    def window_empty(self):
        return self.window[0] > self.window[1]

    @property
    def growth_exponent(self):
        """``log(t_bar) / (n log m)``."""
        p = self.params
        return math.log(self.t_bar) / (p.n * math.log(p.m))

    def as_dict(self):
        return {
            "t_bar": self.t_bar,
            "tau_tilde": self.tau_tilde,
            "t_bar_floor": self.t_bar_floor,
            "window": list(self.window),
            "window_empty": self.window_empty,
        }


def theorem_quantities(params):
    m, n = params.m, params.n
    tb = _t_bar_iv(m, n)
    tt = _tau_tilde_iv(m, n)
    t_floor = _t_bar_floor(m, n)
    return TheoremQuantities(
        params,
        _mid(tb),
        _mid(tt),
        t_floor,
        (n - 1, t_floor),
    )


# ---------------------------------------------------------------------------
# Report types
# ---------------------------------------------------------------------------

def witness(t, i, j, lhs_num, lhs_den, rhs_num, rhs_den):
    return {"t": t, "i": i, "j": j, "lhs_num": int(lhs_num), "lhs_den": int(lhs_den),
            "rhs_num": int(rhs_num), "rhs_den": int(rhs_den)}


@dataclass
class CheckResult:
    """One named check: the range it covered, its verdict and the worst violation."""

    name: str
    range: object
    passed: bool
    witness: dict | None = None
    comparisons: int = 0
    vacuous: bool = False
    asserted: bool = True
    note: str = ""

    def to_dict(self):
        d = {"name": self.name, "range": self.range, "pass": self.passed,
             "witness": self.witness, "comparisons": self.comparisons}
        if self.vacuous:
            d["vacuous"] = True
        if not self.asserted:
            d["asserted"] = False
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def extend(self, results):
        self.checks.extend(results)
        return self

    @property
    def passed(self):
        return all(c.passed for c in self.checks if c.asserted)

    def failures(self):
        return [c for c in self.checks if c.asserted and not c.passed]

    def get(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {"format_version": FORMAT_VERSION, **self.meta, "pass": self.passed,
                "checks": [c.to_dict() for c in self.checks], "diagnostics": self.diagnostics}

    def to_json(self, **kw):
        with unlimited_int_digits():
            return json.dumps(self.to_dict(), **kw)


class _Worst:
    """Tracks the violation with the largest lhs/rhs excess."""

    def __init__(self):
        self.best = None
        self.key = None
        self.count = 0

    def add(self, w):
        self.count += 1
        key = Fraction(w["lhs_num"] * w["rhs_den"], w["lhs_den"] * w["rhs_num"]) \
            if w["lhs_den"] and w["rhs_num"] else Fraction(10**9)
        if self.key is None or key > self.key:
            self.best, self.key = w, key

    def result(self, name, rng, comparisons, **kw):
        return CheckResult(name, rng, self.count == 0, self.best, comparisons, **kw)


# ---------------------------------------------------------------------------
# Role lookup
# ---------------------------------------------------------------------------

class Roles:
    """Index lookup for ``v_i`` (full component) and ``u_i`` (copy ``copy``) by label."""

    def __init__(self, graph, m, n, copy=1):
        self.m, self.n = m, n
        try:
            self._v = {i: graph.index_of(f"bar:v:{i}") for i in range(-n, n + m + 1)}
        except KeyError as exc:
            raise NotGammaGraph(str(exc)) from None
        u = {}
        for i in range(-n, n + m + 1):
            if i == 0:
                continue
            try:
                u[i] = graph.index_of(f"copy{copy}:u:{i}")
            except KeyError:
                u = None
                break
        self._u = u

    @property
    def has_copy(self):
        return self._u is not None

    def v(self, i):
        return self._v[i]

    def u(self, i):
        return self._u[i]


def _mn(params):
    if isinstance(params, GammaParams):
        return params.m, params.n
    m, n = params
    return m, n


def _roles(trace, params):
    m, n = _mn(params)
    return Roles(trace.graph, m, n)


# ---------------------------------------------------------------------------
# Lemma checks
# ---------------------------------------------------------------------------

def _parity_pairs(lo, hi):
    return [(i, j) for i in range(lo, hi + 1) for j in range(i + 1, hi + 1) if (j - i) % 2 == 0]


def _chain_check(counts, idx, pairs, m, T, side, worst):
    """Chain ``1 <= x_i'/x_i <= x_j'/x_j <= m+1`` for every step and pair; returns chain count."""
    done = 0
    for t in range(T):
        now, nxt = counts[t], counts[t + 1]
        for i, j in pairs:
            a, a1 = now[idx(i)], nxt[idx(i)]
            b, b1 = now[idx(j)], nxt[idx(j)]
            if a1 < a:
                worst.add(witness(t, f"{side}{i}", f"{side}{i}", a, a1, 1, 1))
            if a1 * b > b1 * a:
                worst.add(witness(t, f"{side}{i}", f"{side}{j}", a1, a, b1, b))
            if b1 > (m + 1) * b:
                worst.add(witness(t, f"{side}{j}", f"{side}{j}", b1, b, m + 1, 1))
            done += 1
    return done


def check_lemma1(trace, params):
    """Growth-rate ordering along the chain, on the full component and on copy 1.

    For every step ``t < horizon`` and every same-parity pair ``0 <= i < j <= n+1``
    (``0 < i`` on the copy) the ratios satisfy ``1 <= r_i <= r_j <= m+1``.
    """
    roles = _roles(trace, params)
    m, n, T = roles.m, roles.n, trace.horizon
    if T < 1:
        raise HorizonTooShort("lemma 1 needs a horizon of at least 1")
    worst = _Worst()
    counts = trace.counts
    done = _chain_check(counts, roles.v, _parity_pairs(0, n + 1), m, T, "v", worst)
    if roles.has_copy:
        done += _chain_check(counts, roles.u, _parity_pairs(1, n + 1), m, T, "u", worst)
    return worst.result("lemma1", [0, T - 1], done)


def check_lemma2(trace, params):
    """Copy counts never exceed full-component counts, agree before ``v_0`` is felt, and fall behind.

    Returns ``(checks, diagnostics)``. The per-window shrink factors in the
    diagnostics are reported only.
    """
    roles = _roles(trace, params)
    if not roles.has_copy:
        raise NotGammaGraph("lemma 2 needs copy 1 in the graph")
    m, n, T = roles.m, roles.n, trace.horizon
    W = 2 * n + 2
    if T < 4 * W:
        raise HorizonTooShort(f"lemma 2 needs a horizon of at least {4 * W}, got {T}")
    counts = trace.counts
    dist = trace.graph.distances_from(roles.v(0))
    idx = [i for i in range(-n, n + m + 1) if i != 0]

    subset, prefix = _Worst(), _Worst()
    n_sub = n_pre = 0
    for t in range(T + 1):
        row = counts[t]
        for i in idx:
            u, v = row[roles.u(i)], row[roles.v(i)]
            n_sub += 1
            if u > v:
                subset.add(witness(t, f"u{i}", f"v{i}", u, 1, v, 1))
            if t < dist[roles.v(i)]:
                n_pre += 1
                if u != v:
                    prefix.add(witness(t, f"u{i}", f"v{i}", u, 1, v, 1))

    # hub n+1 is asserted; the other indices are reported, since near the
    # center the ratio first climbs toward its quasi-stationary value
    hub = n + 1
    u0, v0 = counts[W][roles.u(hub)], counts[W][roles.v(hub)]
    u1, v1 = counts[T][roles.u(hub)], counts[T][roles.v(hub)]
    strict = _Worst()
    if not u1 * v0 < u0 * v1:
        strict.add(witness(T, f"u{hub}/v{hub}", W, u1, v1, u0, v0))
    decay_all = _Worst()
    for i in range(1, n + m + 1):
        a0, b0 = counts[W][roles.u(i)], counts[W][roles.v(i)]
        a1, b1 = counts[T][roles.u(i)], counts[T][roles.v(i)]
        if a1 * b0 > a0 * b1:
            decay_all.add(witness(T, f"u{i}/v{i}", W, a1, b1, a0, b0))

    factors = {}
    for i in range(1, n + m + 1):
        ui, vi = roles.u(i), roles.v(i)
        row = []
        for t in range(0, T - W + 1, W):
            num = counts[t + W][ui] * counts[t][vi]
            den = counts[t][ui] * counts[t + W][vi]
            row.append(num / den)
        factors[f"u{i}"] = row
    ratio_end = {f"u{i}": counts[T][roles.u(i)] / counts[T][roles.v(i)] for i in range(1, n + m + 1)}

    checks = [
        subset.result("lemma2.subset", [0, T], n_sub),
        prefix.result("lemma2.prefix", [0, T], n_pre),
        strict.result("lemma2.decay", [W, T], 1, note=f"strict, i={hub}"),
        decay_all.result("lemma2.decay_all", [W, T], n + m, asserted=False,
                         note="all i in 1..n+m, non-strict; reported only"),
    ]
    diagnostics = {"window": W, "shrink_factors": factors, "final_ratio": ratio_end,
                   "lemma_bound": 1 - (m + 1) ** (-W)}
    return checks, diagnostics


def check_lemma3(trace, params, t_start=None):
    """Hub growth on the full component exceeds copy growth by at most the ``v_0`` share.

    Checked for ``t_start <= t < horizon`` (default ``t_start = n+1``).
    """
    roles = _roles(trace, params)
    if not roles.has_copy:
        raise NotGammaGraph("lemma 3 needs copy 1 in the graph")
    m, n, T = roles.m, roles.n, trace.horizon
    if t_start is None:
        t_start = n + 1
    if T < t_start + 1:
        raise HorizonTooShort(f"lemma 3 needs a horizon of at least {t_start + 1}, got {T}")
    hv, hu, c = roles.v(n + 1), roles.u(n + 1), roles.v(0)
    worst = _Worst()
    counts = trace.counts
    done = 0
    for t in range(t_start, T):
        v, v1 = counts[t][hv], counts[t + 1][hv]
        u, u1 = counts[t][hu], counts[t + 1][hu]
        v0 = counts[t][c]
        lhs_num, lhs_den = v1 * u, v * u1
        rhs_num, rhs_den = m * u + (m + 1) * v0, m * u
        done += 1
        if lhs_num * rhs_den > rhs_num * lhs_den:
            worst.add(witness(t, f"v{n + 1}", f"u{n + 1}", lhs_num, lhs_den, rhs_num, rhs_den))
    return worst.result("lemma3", [t_start, T - 1], done)


# ---------------------------------------------------------------------------
# Lower-bound window
# ---------------------------------------------------------------------------

def check_symmetry(trace, params):
    """Mirror equality ``v_i = v_{-i}``, equal hubs per component, identical copies."""
    m, n = _mn(params)
    g = trace.graph
    roles = Roles(g, m, n)
    copies = []
    c = 1
    while True:
        try:
            copies.append(Roles(g, m, n, copy=c))
        except NotGammaGraph:
            break
        if not copies[-1].has_copy:
            copies.pop()
            break
        c += 1
    mirror, hubs, same = _Worst(), _Worst(), _Worst()
    n_m = n_h = n_s = 0
    for t, row in enumerate(trace.counts):
        for i in range(1, n + 1):
            n_m += 1
            a, b = row[roles.v(i)], row[roles.v(-i)]
            if a != b:
                mirror.add(witness(t, f"v{i}", f"v{-i}", a, 1, b, 1))
            for r in copies:
                n_m += 1
                a, b = row[r.u(i)], row[r.u(-i)]
                if a != b:
                    mirror.add(witness(t, f"u{i}", f"u{-i}", a, 1, b, 1))
        for which, get in [("v", roles.v)] + [(f"u[{k + 1}]", r.u) for k, r in enumerate(copies)]:
            first = row[get(n + 1)]
            for j in range(2, m + 1):
                n_h += 1
                if row[get(n + j)] != first:
                    hubs.add(witness(t, f"{which}{n + 1}", f"{which}{n + j}", first, 1, row[get(n + j)], 1))
        for r in copies[1:]:
            for i in range(-n, n + m + 1):
                if i == 0:
                    continue
                n_s += 1
                a, b = row[copies[0].u(i)], row[r.u(i)]
                if a != b:
                    same.add(witness(t, f"u{i}", f"u{i}", a, 1, b, 1))
    T = trace.horizon
    return [mirror.result("symmetry.mirror", [0, T], n_m),
            hubs.result("symmetry.hubs", [0, T], n_h),
            same.result("symmetry.copies", [0, T], n_s)]


def check_theorem_window(trace, params, k=None):
    """Checkpoints of the lower-bound argument.

    (a)-(c) and (h) over the window ``[n-1, floor(t_bar)]``; the step-3
    identities (d), (e), (f) at fixed steps; (g) over ``1 .. horizon``.
    Checks needing copy vertices or GammaParams are skipped on a lone full
    component. An empty window is reported as vacuous, not failed.
    Returns ``(checks, quantities)``.
    """
    m, n = _mn(params)
    roles = _roles(trace, params)
    counts, T = trace.counts, trace.horizon
    gamma = isinstance(params, GammaParams) and roles.has_copy
    if k is None and isinstance(params, GammaParams):
        k = params.k
    out = []

    # (d) step-3 identities
    if T < max(3, n - 1):
        raise HorizonTooShort(f"the fixed-step checkpoints need a horizon of at least {max(3, n - 1)}")
    r3 = counts[3]
    d = _Worst()
    a, b = r3[roles.v(n - 1)], r3[roles.v(n + 1)]
    if a * (4 * m + 4) != b * (2 * m + 6):
        d.add(witness(3, f"v{n - 1}", f"v{n + 1}", a, b, 2 * m + 6, 4 * m + 4))
    a2, b2 = r3[roles.v(n - 2)], r3[roles.v(n)]
    if a2 * (2 * m * m + 3 * m + 3) != b2 * (m + 7):
        d.add(witness(3, f"v{n - 2}", f"v{n}", a2, b2, m + 7, 2 * m * m + 3 * m + 3))
    out.append(d.result("theorem.d_step3_identities", [3, 3], 2))

    # (e) center count at n-1
    e = _Worst()
    c0 = counts[n - 1][roles.v(0)]
    if c0 != 2 ** (n - 1):
        e.add(witness(n - 1, "v0", "2^(n-1)", c0, 1, 2 ** (n - 1), 1))
    out.append(e.result("theorem.e_center", [n - 1, n - 1], 1))

    # (f) hub counts at n-1
    if roles.has_copy:
        f = _Worst()
        hu, hv = counts[n - 1][roles.u(n + 1)], counts[n - 1][roles.v(n + 1)]
        if hu != hv:
            f.add(witness(n - 1, f"u{n + 1}", f"v{n + 1}", hu, 1, hv, 1))
        if hu < (2 * m) ** ((n - 1) // 2):
            f.add(witness(n - 1, f"u{n + 1}", "(2m)^((n-1)/2)", (2 * m) ** ((n - 1) // 2), 1, hu, 1))
        out.append(f.result("theorem.f_hub_start", [n - 1, n - 1], 2))

    # (g) end-to-hub ratio bound
    g = _Worst()
    for t in range(1, T + 1):
        a, b = counts[t][roles.v(n)], counts[t][roles.v(n + 1)]
        if 2 * a > (m + 1) * b:
            g.add(witness(t, f"v{n}", f"v{n + 1}", a, b, m + 1, 2))
    out.append(g.result("theorem.g_end_over_hub", [1, T], T))

    if not gamma:
        return out, None

    q = theorem_quantities(params)
    lo, hi = q.window
    names = ["theorem.a_hub_ratio", "theorem.b_chain_over_copy_hub",
             "theorem.c_center_share", "theorem.h_outside_top_k"]
    if q.window_empty:
        for name in names:
            out.append(CheckResult(name, [lo, hi], True, vacuous=True,
                                   note=f"EMPTY window: t_bar={q.t_bar:.6g} < n-1={n - 1}"))
        return out, q
    if T < hi:
        raise HorizonTooShort(f"window checks need a horizon of at least {hi}, got {T}")

    bound = _endpoints(_running_bound_iv(m, n))[0]
    ell_m = params.ell * params.m
    outside = set(range(params.bar_size, params.N))
    ca, cb, cc, ch = _Worst(), _Worst(), _Worst(), _Worst()
    for t in range(lo, hi + 1):
        row = counts[t]
        vh, uh = row[roles.v(n + 1)], row[roles.u(n + 1)]
        if 6 * vh > 7 * uh:
            ca.add(witness(t, f"v{n + 1}", f"u{n + 1}", vh, uh, 7, 6))
        top = max(row[roles.v(n - 1)], row[roles.v(n - 2)])
        if 8 * top > 7 * uh:
            cb.add(witness(t, f"v{n - 1}|v{n - 2}", f"u{n + 1}", top, uh, 7, 8))
        v0 = row[roles.v(0)]
        if v0 * bound.denominator > bound.numerator * uh:
            cc.add(witness(t, "v0", f"u{n + 1}", v0, uh, bound.numerator, bound.denominator))
        members = weak_top_k(row, k).members
        count_out = len(members & outside)
        if count_out < ell_m:
            ch.add(witness(t, "top_k_outside", "ell*m", count_out, 1, ell_m, 1))
    rng = [lo, hi]
    size = hi - lo + 1
    out += [ca.result(names[0], rng, size), cb.result(names[1], rng, size),
            cc.result(names[2], rng, size), ch.result(names[3], rng, size)]
    return out, q


# ---------------------------------------------------------------------------
# Everything at once
# ---------------------------------------------------------------------------

def verify_gamma(trace, params):
    """Run every check that the trace horizon supports.

    Checks whose horizon requirement is not met are listed as skipped (not
    asserted) with the horizon they would need.
    """
    if not isinstance(params, GammaParams):
        raise InvalidParameter("verify_gamma needs GammaParams")
    report = VerificationReport(meta={"params": params.as_dict(), "horizon": trace.horizon})
    report.extend(check_symmetry(trace, params))
    report.extend([check_lemma1(trace, params)])
    try:
        checks, diag = check_lemma2(trace, params)
        report.extend(checks)
        report.diagnostics["lemma2"] = diag
    except HorizonTooShort as exc:
        report.checks.append(CheckResult("lemma2", None, True, asserted=False, vacuous=True,
                                         note=f"skipped: {exc}"))
    try:
        report.extend([check_lemma3(trace, params)])
    except HorizonTooShort as exc:
        report.checks.append(CheckResult("lemma3", None, True, asserted=False, vacuous=True,
                                         note=f"skipped: {exc}"))
    checks, q = check_theorem_window(trace, params)
    report.extend(checks)
    if q is not None:
        report.meta["theorem"] = q.as_dict()
    return report
