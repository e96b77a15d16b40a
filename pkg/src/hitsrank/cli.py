"""Command-line entry point: ``hitsrank generate|run|verify|converge``.

Exit codes: 0 success, 1 verification failure, 2 usage or parameter error,
3 resource cap or horizon too short.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import kernels
from .engine import (
    DEFAULT_EXACT_MAX_STEPS,
    DEFAULT_FLOAT_MAX_STEPS,
    pebble_run,
    score_run,
    write_trace_csv,
)
from .errors import (
    AmbiguousDominance,
    ConstraintViolation,
    DigitCapExceeded,
    HitsRankError,
    HorizonTooShort,
    InvalidParameter,
    NotGammaGraph,
    ParseError,
)
from .graph import GammaGraph, build_gamma, load_graph, save_graph, validate_params
from .ranking import convergence_tau, limit_top_k, measure_convergence
from .verify import FORMAT_VERSION, theorem_quantities, verify_gamma

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

DEFAULT_EXACT_HORIZON = 2000
DEFAULT_FLOAT_HORIZON = 100_000
DEFAULT_EIG_TOL = 1e-12


@dataclass
class ExperimentConfig:
    command: str
    h: int | None = None
    k: int | None = None
    n: int | None = None
    horizon: int | None = None
    mode: str = "float"
    tol: float = DEFAULT_EIG_TOL
    graph: str | None = None
    out: str | None = None

    def validate(self):
        for name in ("h", "k", "n"):
            val = getattr(self, name)
            if val is not None and val < 1:
                raise InvalidParameter(f"--{name} must be positive, got {val}")
        if self.command == "converge" and self.h is not None and self.k is not None and self.h > self.k:
            raise InvalidParameter(f"--h={self.h} must not exceed --k={self.k}")
        if self.horizon is not None and self.horizon < 0:
            raise InvalidParameter(f"--horizon must be >= 0, got {self.horizon}")
        if self.mode not in ("exact", "float"):
            raise InvalidParameter(f"--mode must be exact or float, got {self.mode!r}")
        if not self.tol > 0:
            raise InvalidParameter(f"--tol must be positive, got {self.tol}")
        if self.horizon is not None:
            cap = DEFAULT_EXACT_MAX_STEPS if self.mode == "exact" else DEFAULT_FLOAT_MAX_STEPS
            if self.horizon > cap:
                raise DigitCapExceeded(f"horizon {self.horizon} exceeds the {self.mode}-mode cap {cap}")
        return self


def _emit(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _dump(obj):
    return json.dumps(obj, indent=2) + "\n"


def cmd_generate(cfg):
    params = validate_params(cfg.h, cfg.k, cfg.n)
    gamma = build_gamma(params)
    out = Path(cfg.out or f"gamma_h{cfg.h}_k{cfg.k}_n{cfg.n}.txt")
    save_graph(gamma.graph, out)
    q = theorem_quantities(params)
    window = "EMPTY" if q.window_empty else f"[{q.window[0]},{q.window[1]}]"
    print(f"h={params.h} k={params.k} n={params.n} m={params.m} ell={params.ell} "
          f"N={params.N} t_bar≈{q.t_bar:.2f} window={window}")
    print(f"wrote {out} and {out}.labels")
    return EXIT_OK


def cmd_run(cfg):
    graph = load_graph(cfg.graph)
    steps = cfg.horizon
    if cfg.mode == "exact":
        trace = pebble_run(graph, steps)
    else:
        trace = score_run(graph, steps)
    if cfg.out is None or cfg.out == "-":
        write_trace_csv(trace, sys.stdout)
    else:
        write_trace_csv(trace, cfg.out)
    return EXIT_OK


def _gamma_of(graph, h, k, n):
    params = validate_params(h, k, n)
    gamma = GammaGraph.from_graph(graph, params)
    if graph.num_vertices != params.N:
        raise NotGammaGraph(f"graph has {graph.num_vertices} vertices, parameters imply N={params.N}")
    return gamma


def cmd_verify(cfg):
    graph = load_graph(cfg.graph)
    gamma = _gamma_of(graph, cfg.h, cfg.k, cfg.n)
    trace = pebble_run(graph, cfg.horizon)
    report = verify_gamma(trace, gamma.params)
    report.meta = {"command": "verify", "graph": str(cfg.graph), **report.meta}
    _emit(report.to_json(indent=2) + "\n", cfg.out)
    for c in report.failures():
        print(f"FAIL {c.name}: witness {c.witness}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_converge(cfg):
    graph = load_graph(cfg.graph)
    target = graph
    params = None
    if cfg.n is not None:
        target = _gamma_of(graph, cfg.h, cfg.k, cfg.n)
        params = target.params
    limit = limit_top_k(target, cfg.k, cfg.tol)
    if cfg.mode == "float":
        report = measure_convergence(target, cfg.k, cfg.h, cfg.horizon, limit, raise_if_short=False)
    else:
        trace = pebble_run(graph, cfg.horizon)
        report = convergence_tau(trace, cfg.k, cfg.h, limit, raise_if_short=False)
    d = {"format_version": FORMAT_VERSION, "command": "converge", "graph": str(cfg.graph),
         "mode": cfg.mode, "backend": kernels.BACKEND if cfg.mode == "float" else "exact",
         "eig_tol": cfg.tol}
    d.update(report.to_dict())
    if not report.converged:
        d["note"] = (f"not converged by horizon {report.horizon}; tau >= {report.tau_lower_bound}. "
                     "Raise --horizon to look further.")
    if params is not None:
        q = theorem_quantities(params)
        d["params"] = params.as_dict()
        d["t_bar"] = round(q.t_bar, 2)
        d["t_bar_exact"] = q.t_bar
        d["t_bar_floor"] = q.t_bar_floor
        d["tau_exceeds_t_bar"] = report.tau_lower_bound > q.t_bar
    _emit(_dump(d), cfg.out)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="hitsrank", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write the Gamma_{h,k,n} graph and print its size")
    g.add_argument("--h", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--out", help="edge-list path (labels go to <out>.labels)")

    r = sub.add_parser("run", help="write a pebble-count or score trace as CSV")
    r.add_argument("graph")
    r.add_argument("--steps", type=int, required=True, dest="horizon")
    r.add_argument("--mode", choices=("exact", "float"), default="exact")
    r.add_argument("--out", help="CSV path (default: stdout)")

    v = sub.add_parser("verify", help="check the lemmas and lower-bound checkpoints exactly")
    v.add_argument("graph")
    v.add_argument("--h", type=int, required=True)
    v.add_argument("--k", type=int, required=True)
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--horizon", type=int, default=DEFAULT_EXACT_HORIZON)
    v.add_argument("--out", help="JSON report path (default: stdout)")

    c = sub.add_parser("converge", help="measure rank convergence on h of the top k")
    c.add_argument("graph")
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--h", type=int, required=True)
    c.add_argument("--n", type=int, help="Gamma chain parameter; enables the t_bar comparison")
    c.add_argument("--horizon", type=int)
    c.add_argument("--mode", choices=("exact", "float"), default="float")
    c.add_argument("--tol", type=float, default=DEFAULT_EIG_TOL)
    c.add_argument("--out", help="JSON report path (default: stdout)")
    return p


_COMMANDS = {"generate": cmd_generate, "run": cmd_run, "verify": cmd_verify,
             "converge": cmd_converge}


def main(argv=None):
    args = build_parser().parse_args(argv)
    cfg = ExperimentConfig(**{k: v for k, v in vars(args).items()
                              if k in ExperimentConfig.__dataclass_fields__})
    if args.command == "verify":
        cfg.mode = "exact"
    if args.command == "converge" and cfg.horizon is None:
        cfg.horizon = DEFAULT_FLOAT_HORIZON if cfg.mode == "float" else DEFAULT_EXACT_HORIZON
    try:
        cfg.validate()
        return _COMMANDS[args.command](cfg)
    except (ConstraintViolation, InvalidParameter, ParseError, NotGammaGraph) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DigitCapExceeded, HorizonTooShort) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (AmbiguousDominance, HitsRankError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
