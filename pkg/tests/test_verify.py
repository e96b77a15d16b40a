import json
import math

import pytest

from hitsrank import (
    Graph,
    HorizonTooShort,
    InvalidParameter,
    NotGammaGraph,
    build_gamma_bar,
    check_lemma1,
    check_lemma2,
    check_lemma3,
    check_symmetry,
    check_theorem_window,
    gamma_from_hkn,
    pebble_run,
    theorem_quantities,
    validate_params,
    verify_gamma,
)
from hitsrank.verify import _endpoints, _running_bound_iv, _t_bar_iv
from oracles import t_bar_float


@pytest.mark.parametrize(
    "hkn, t_bar, floor, window",
    [((8, 13, 15), 25.96, 25, (14, 25)), ((13, 25, 9), 26.58, 26, (8, 26)), ((8, 13, 7), 0.66, 0, (6, 0))],
)
def test_theorem_quantities(hkn, t_bar, floor, window):
    p = validate_params(*hkn)
    q = theorem_quantities(p)
    assert round(q.t_bar, 2) == t_bar
    assert q.t_bar == pytest.approx(t_bar_float(p.m, p.n), rel=1e-14)
    assert q.t_bar_floor == floor
    assert q.window == window
    assert q.window_empty == (window[0] > window[1])


def test_interval_endpoints_enclose_float():
    lo, hi = _endpoints(_t_bar_iv(5, 15))
    assert lo < hi and hi - lo < 1e-20
    assert lo <= t_bar_float(5, 15) * (1 + 1e-15)
    rlo, rhi = _endpoints(_running_bound_iv(5, 15))
    assert rlo <= math.e * (2 / 5) ** 7 <= rhi * (1 + 1e-15)


def test_growth_exponent_stays_below_half():
    # log(t_bar)/(n log m) tends to log(m/2)/(2 log m), which is below 1/2
    for m, n in [(5, 15), (5, 41), (10, 31), (20, 61)]:
        p = validate_params(m + 3, m + 5, n)
        ge = theorem_quantities(p).growth_exponent
        limit = math.log(m / 2) / (2 * math.log(m))
        assert ge < limit < 0.5


def test_verify_gamma_passes(trace_8_13_15, gamma_8_13_15):
    rep = verify_gamma(trace_8_13_15, gamma_8_13_15.params)
    assert rep.passed, rep.failures()
    assert rep.get("lemma2.decay").passed
    assert rep.meta["theorem"]["window"] == [14, 25]
    doc = json.loads(rep.to_json())
    assert doc["format_version"] == 1 and doc["pass"] is True


def test_lemma1_comparison_count(trace_8_13_15, gamma_8_13_15):
    res = check_lemma1(trace_8_13_15, gamma_8_13_15.params)
    n, T = 15, trace_8_13_15.horizon
    pairs_v = sum(1 for i in range(0, n + 2) for j in range(i + 1, n + 2) if (j - i) % 2 == 0)
    pairs_u = sum(1 for i in range(1, n + 2) for j in range(i + 1, n + 2) if (j - i) % 2 == 0)
    assert res.comparisons == T * (pairs_v + pairs_u)
    assert res.passed and res.witness is None


def test_lemma2_all_indices_reported_not_asserted(trace_8_13_7, gamma_8_13_7):
    checks, diag = check_lemma2(trace_8_13_7, gamma_8_13_7.params)
    by = {c.name: c for c in checks}
    assert by["lemma2.subset"].passed and by["lemma2.prefix"].passed and by["lemma2.decay"].passed
    assert by["lemma2.decay_all"].asserted is False
    assert diag["window"] == 16
    # the center neighbor's ratio rises before it settles
    assert diag["final_ratio"]["u1"] > 0.7


def test_lemma2_short_horizon(gamma_8_13_7):
    with pytest.raises(HorizonTooShort):
        check_lemma2(pebble_run(gamma_8_13_7.graph, 20), gamma_8_13_7.params)


def test_lemma3_before_chain_fills(gamma_8_13_7):
    tr = pebble_run(gamma_8_13_7.graph, 30)
    # hubs on both sides agree up to step n, so the left side is exactly 1
    assert all(tr[t, gamma_8_13_7.v(8)] == tr[t, gamma_8_13_7.u(8)] for t in range(7))
    assert check_lemma3(tr, gamma_8_13_7.params, t_start=0).passed


def test_window_empty_is_vacuous():
    g = gamma_from_hkn(8, 13, 13)
    tr = pebble_run(g.graph, 100)
    checks, q = check_theorem_window(tr, g.params)
    assert q.window_empty
    vac = [c for c in checks if c.vacuous]
    assert len(vac) == 4 and all("EMPTY" in c.note for c in vac)


def test_short_horizon_skips_lemmas(gamma_8_13_15):
    rep = verify_gamma(pebble_run(gamma_8_13_15.graph, 30), gamma_8_13_15.params)
    assert rep.passed
    assert not rep.get("lemma2").asserted
    assert rep.get("lemma3").asserted


def test_verify_gamma_rejects_tuple_params(trace_8_13_7):
    with pytest.raises(InvalidParameter):
        verify_gamma(trace_8_13_7, (5, 7))


def test_lemma_checks_need_copy():
    tr = pebble_run(build_gamma_bar(5, 7), 70)
    with pytest.raises(NotGammaGraph):
        check_lemma3(tr, (5, 7))


def _with_extra_edge(gamma, a, b, T):
    g = gamma.graph.with_edge(a, b)
    return pebble_run(g, T)


@pytest.mark.parametrize("which", ["v1-v3", "v0-v2"])
def test_canary_edges_break_checks(gamma_8_13_7, which):
    g = gamma_8_13_7
    a, b = {"v1-v3": (g.v(1), g.v(3)), "v0-v2": (g.v(0), g.v(2))}[which]
    tr = _with_extra_edge(g, a, b, 100)
    mirror = check_symmetry(tr, g.params)[0]
    assert not mirror.passed
    w = mirror.witness
    assert w["lhs_num"] != w["rhs_num"]


def test_canary_on_copy_breaks_copy_identity(gamma_13_25_9):
    g = gamma_13_25_9
    tr = _with_extra_edge(g, g.u(1, 1), g.u(3, 1), 60)
    names = {c.name: c.passed for c in check_symmetry(tr, g.params)}
    assert not names["symmetry.copies"]
    assert not names["symmetry.mirror"]


def test_canary_breaks_lemma1(gamma_8_13_7):
    g = gamma_8_13_7
    tr = _with_extra_edge(g, g.v(2), g.v(5), 60)
    assert not check_lemma1(tr, g.params).passed


def test_lone_component_checkpoints():
    tr = pebble_run(build_gamma_bar(3, 3), 10)
    checks, q = check_theorem_window(tr, (3, 3))
    assert q is None
    assert {c.name for c in checks} == {
        "theorem.d_step3_identities", "theorem.e_center", "theorem.g_end_over_hub"}
    assert all(c.passed for c in checks)


def test_directed_graph_without_roles():
    g = Graph.directed(3, {(0, 1)})
    with pytest.raises(NotGammaGraph):
        check_lemma1(pebble_run(g, 3), (3, 3))
