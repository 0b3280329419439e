"""Command-line entry point.

Exit codes: 0 success, 1 usage/domain/spec error, 2 budget/capacity error,
3 underpowered statistics.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .attachment import AttachmentSpec, StepSpec, as_step, spec_from_json
from .brw import sample_minima, simulate_min
from .constants import DEFAULT_TOL, limit_constants
from .errors import DagDepthError, SpecError
from .harness import ExperimentConfig, rows_to_csv, run, run_brw_tails
from .oracle import DEFAULT_BUDGET, exact_depths
from .sarrd import depth_stats, generate_depths, save_depths
from .stats import StatSummary

DEFAULT_K = 2
DEFAULT_DIST = "uniform"
DEFAULT_REPS = 100
DEFAULT_SEED = 42


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def parse_dist(text):
    """``uniform`` | ``power:ALPHA`` | ``exp:RATE`` | ``lattice:FILE``."""
    kind, _, arg = text.partition(":")
    try:
        if kind == "uniform" and not arg:
            return AttachmentSpec.uniform()
        if kind == "power":
            return AttachmentSpec.power_tail(float(arg))
        if kind == "exp":
            return StepSpec.exponential(float(arg))
        if kind == "lattice":
            with open(arg) as fh:
                spec = spec_from_json(json.load(fh))
            if not (isinstance(spec, StepSpec) and spec.kind == "lattice"):
                raise SpecError(f"{arg} does not hold a lattice spec")
            return spec
    except (ValueError, OSError) as exc:
        if isinstance(exc, DagDepthError):
            raise
        raise argparse.ArgumentTypeError(f"bad --dist {text!r}: {exc}") from exc
    raise argparse.ArgumentTypeError(f"bad --dist {text!r}")


def _int(text):
    v = float(text)
    if v != int(v):
        raise ValueError(f"{text} is not an integer")
    return int(v)


def parse_grid(text):
    """``a,b,c`` or geometric ``a:b:xSTEP`` (``a, a*STEP, ...`` up to ``b``)."""
    try:
        if ":" in text:
            lo, hi, step = text.split(":")
            if not step.startswith("x"):
                raise ValueError("geometric step must look like xSTEP")
            a, b, r = float(lo), float(hi), float(step[1:])
            if r <= 1 or a <= 0:
                raise ValueError("need a > 0 and STEP > 1")
            out = []
            v = a
            while v <= b * (1 + 1e-12):
                out.append(int(round(v)))
                v *= r
            return out
        return [_int(t) for t in text.split(",") if t]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}") from exc


def _common(p, reps=True):
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.add_argument("--dist", type=parse_dist, default=parse_dist(DEFAULT_DIST))
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    if reps:
        p.add_argument("--reps", type=int, default=DEFAULT_REPS)
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser():
    parser = _Parser(prog="dagdepth", description="Longest-path depths in random recursive DAGs.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("constants", help="limit constants lambda_k, gamma, beta")
    _common(p, reps=False)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)

    p = sub.add_parser("simulate-dag", help="one DAG realization, depth statistics")
    _common(p, reps=False)
    p.add_argument("--n", type=_int, required=True)
    p.add_argument("--dump", metavar="FILE", help="write the depth array in binary form")

    p = sub.add_parser("simulate-brw", help="branching random walk minimum")
    _common(p, reps=False)
    p.add_argument("--m", type=_int, required=True)
    p.add_argument("--reps", type=int, default=None, help="summarize M_m/m over replications")

    p = sub.add_parser("tails", help="BRW right/left tail rate estimates")
    _common(p)
    p.add_argument("--m", type=parse_grid, required=True)
    p.add_argument("--eps-right", type=float, default=None)
    p.add_argument("--eps-left", type=float, default=None)
    p.add_argument("--out", metavar="CSV")

    p = sub.add_parser("oracle", help="exact depth statistics by enumeration")
    p.add_argument("--n", type=_int, required=True)
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.add_argument("--budget", type=_int, default=DEFAULT_BUDGET)
    p.add_argument("--format", choices=("json",), default="json")

    p = sub.add_parser("convergence", help="normalized depth statistics over an n grid")
    _common(p)
    p.add_argument("--n", type=parse_grid)
    p.add_argument("--workers", default="1")
    p.add_argument("--out", metavar="CSV")
    p.add_argument("--resume", action="store_true")
    p.add_argument("--oracle-check", action="store_true", help="compare with exact enumeration")
    p.add_argument("--config", metavar="JSON", help="run an ExperimentConfig file instead")
    return parser


def _emit(obj):
    json.dump(obj, sys.stdout, indent=2, allow_nan=False)
    sys.stdout.write("\n")


def _workers(text):
    text = os.environ.get("DAGDEPTH_WORKERS", text)
    return text if text == "auto" else int(text)


def _cmd_constants(a):
    lc = limit_constants(a.dist, a.k, a.tol)
    _emit(dict(lc.to_json(), spec=a.dist.to_json(), min_depth_constant=lc.min_depth_constant))


def _cmd_simulate_dag(a):
    if not isinstance(a.dist, AttachmentSpec):
        raise SpecError("simulate-dag needs an attachment law (uniform or power:ALPHA)")
    prof = generate_depths(a.n, a.k, a.dist, a.seed)
    if a.dump:
        save_depths(prof, a.dump)
    st = depth_stats(prof)
    out = {"n": a.n, "k": a.k, "seed": a.seed, "spec": a.dist.to_json(),
           "d_n": st.d_n, "min_half": st.min_half, "max_all": st.max_all}
    if a.format == "csv":
        sys.stdout.write("n,k,seed,d_n,min_half,max_all\n")
        sys.stdout.write(f"{a.n},{a.k},{a.seed},{st.d_n},{st.min_half},{st.max_all}\n")
    else:
        _emit(out)


def _cmd_simulate_brw(a):
    step = as_step(a.dist)
    if a.reps is None:
        r = simulate_min(step, a.k, a.m, a.seed)
        _emit({"m": r.m, "k": r.k, "seed": r.seed, "spec": step.to_json(),
               "min_value": r.min_value, "nodes_visited": r.nodes_visited})
        return
    mins = sample_minima(step, a.k, a.m, a.reps, a.seed)
    s = StatSummary()
    s.extend(mins / a.m if a.m else mins)
    _emit({"m": a.m, "k": a.k, "seed": a.seed, "spec": step.to_json(),
           "stat": "min_over_m", "summary": s.to_json()})


def _cmd_tails(a):
    cfg = ExperimentConfig(
        experiment="brw_tails", spec=as_step(a.dist).to_json(), k=a.k, m_grid=a.m,
        replications=a.reps, master_seed=a.seed, output_path=a.out,
        eps_right=a.eps_right, eps_left=a.eps_left,
    )
    if cfg.eps_right is None and cfg.eps_left is None:
        raise UsageError("tails: give --eps-right and/or --eps-left")
    out = run_brw_tails(cfg)
    if a.format == "csv":
        sys.stdout.write(rows_to_csv(out["rows"]))
    else:
        _emit({k: v for k, v in out.items() if k != "rows"})
    if any("error" in t for t in out["tails"].values()):
        for t in out["tails"].values():
            if "error" in t:
                print(t["error"], file=sys.stderr)
        return 3
    return 0


def _cmd_oracle(a):
    _emit(exact_depths(a.n, a.k, a.budget).to_json())


def _cmd_convergence(a):
    if a.config:
        with open(a.config) as fh:
            cfg = ExperimentConfig.from_json(json.load(fh))
    else:
        if not a.n:
            raise UsageError("convergence: --n grid or --config is required")
        cfg = ExperimentConfig(
            experiment="oracle_check" if a.oracle_check else "convergence",
            spec=a.dist.to_json(), k=a.k, n_grid=a.n, replications=a.reps,
            master_seed=a.seed, output_path=a.out, worker_count=_workers(a.workers),
        )
    kw = {"resume": True} if (a.resume and cfg.experiment == "convergence") else {}
    result = run(cfg, **kw)
    rows = result["rows"] if isinstance(result, dict) else result
    if a.format == "csv":
        sys.stdout.write(rows_to_csv(rows))
    else:
        _emit({"config": cfg.to_json(), "rows": rows})


_COMMANDS = {
    "constants": _cmd_constants,
    "simulate-dag": _cmd_simulate_dag,
    "simulate-brw": _cmd_simulate_brw,
    "tails": _cmd_tails,
    "oracle": _cmd_oracle,
    "convergence": _cmd_convergence,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args) or 0
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except DagDepthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except SystemExit as exc:  # --help / --version
        return exc.code if isinstance(exc.code, int) else 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
