"""Reproducible Monte Carlo experiments.

Replication ``r`` at grid index ``g`` is seeded with
``derive_seed(master_seed, (g << 32) + r)``, so output depends only on the
config, never on the worker count. Rows are written to CSV one grid point at
a time with the header ``CSV_COLUMNS``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from . import brw
from .attachment import AttachmentSpec, StepSpec, spec_from_json
from .constants import limit_constants
from .errors import DomainError, NoRootError, SpecError, UnderpoweredError
from .oracle import exact_depths
from .rng import derive_seed
from .sarrd import depth_stats, generate_depths, load_depths, save_depths
from .stats import StatSummary

CSV_COLUMNS = [
    "experiment", "n_or_m", "k", "spec", "stat", "count", "mean", "variance",
    "q05", "q25", "q50", "q75", "q95", "reference",
]
EXPERIMENTS = ("convergence", "brw_tails", "oracle_check")


@dataclass
class ExperimentConfig:
    experiment: str
    spec: dict = field(default_factory=lambda: {"kind": "uniform"})
    k: int = 2
    n_grid: List[int] = field(default_factory=list)
    m_grid: List[int] = field(default_factory=list)
    replications: int = 100
    master_seed: int = 42
    output_path: Optional[str] = None
    worker_count: Union[int, str] = 1
    eps_right: Optional[float] = None
    eps_left: Optional[float] = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise DomainError(f"experiment must be one of {EXPERIMENTS}")
        if self.replications < 1:
            raise DomainError("replications must be >= 1")
        for name in ("n_grid", "m_grid"):
            grid = list(getattr(self, name))
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise DomainError(f"{name} must be strictly increasing")
            setattr(self, name, grid)
        if not (self.worker_count == "auto" or (isinstance(self.worker_count, int) and self.worker_count >= 1)):
            raise DomainError("worker_count must be a positive integer or 'auto'")
        spec_from_json(self.spec)

    @property
    def parsed_spec(self):
        return spec_from_json(self.spec)

    def workers(self):
        if self.worker_count == "auto":
            return os.cpu_count() or 1
        return self.worker_count

    def to_json(self):
        return asdict(self)

    @classmethod
    def from_json(cls, obj):
        known = {f.name for f in fields(cls)}
        extra = set(obj) - known
        if extra:
            raise DomainError(f"unknown config fields: {sorted(extra)}")
        return cls(**obj)

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def loads(cls, text):
        return cls.from_json(json.loads(text))


def stream_seed(master_seed, grid_index, rep):
    return derive_seed(master_seed, (grid_index << 32) + rep)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def summary_row(experiment, n_or_m, k, spec_label, stat, summary: StatSummary, reference):
    q = summary.quantiles()
    values = [
        experiment, n_or_m, k, spec_label, stat, summary.count, summary.mean,
        summary.variance, *q, reference,
    ]
    return dict(zip(CSV_COLUMNS, values))


class RowWriter:
    """Serialized CSV writer that flushes after every grid point."""

    def __init__(self, path=None, append=False, stream=None):
        self._own = None
        if path is not None:
            exists = Path(path).exists() and Path(path).stat().st_size > 0
            self._own = open(path, "a" if append else "w", newline="")
            self.fh = self._own
            write_header = not (append and exists)
        else:
            self.fh = stream
            write_header = stream is not None
        self.writer = csv.writer(self.fh, lineterminator="\n") if self.fh else None
        if write_header and self.writer:
            self.writer.writerow(CSV_COLUMNS)

    def write(self, rows):
        if self.writer is None:
            return
        for row in rows:
            self.writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
        self.fh.flush()

    def close(self):
        if self._own:
            self._own.close()


def rows_to_csv(rows):
    buf = io.StringIO()
    w = RowWriter(stream=buf)
    w.write(rows)
    return buf.getvalue()


def _completed_grid_points(path):
    if path is None or not Path(path).exists():
        return set()
    with open(path, newline="") as fh:
        return {int(r["n_or_m"]) for r in csv.DictReader(fh)}


def _realize(args):
    n, k, spec, seed, cache_dir = args
    if cache_dir is not None:
        f = Path(cache_dir) / f"depths_{spec.label()}_k{k}_n{n}_s{seed}.bin"
        if f.exists():
            return depth_stats(load_depths(f, spec))
        prof = generate_depths(n, k, spec, seed)
        save_depths(prof, f)
        return depth_stats(prof)
    return depth_stats(generate_depths(n, k, spec, seed))


def _depth_samples(config, grid_index, n, spec, pool, cache_dir=None):
    jobs = [
        (n, config.k, spec, stream_seed(config.master_seed, grid_index, r), cache_dir)
        for r in range(config.replications)
    ]
    results = list(pool.map(_realize, jobs)) if pool else [_realize(j) for j in jobs]
    dn = np.array([s.d_n for s in results], dtype=float)
    mh = np.array([s.min_half for s in results], dtype=float)
    mx = np.array([s.max_all for s in results], dtype=float)
    return dn, mh, mx


def _attachment(config):
    spec = config.parsed_spec
    if not isinstance(spec, AttachmentSpec):
        raise SpecError(f"{config.experiment} needs an attachment spec, got {spec.kind}")
    return spec


def convergence_references(spec: AttachmentSpec, k: int):
    """Reference limits for D_n, min_half and max_all, each divided by log n."""
    lc = limit_constants(spec, k)
    return {
        "dn_over_logn": lc.lambda_k,
        "minhalf_over_logn": lc.min_depth_constant,
        "maxall_over_logn": k * math.e if spec.kind == "uniform" else None,
    }


def _pool(config):
    w = config.workers()
    return ThreadPoolExecutor(max_workers=w) if w > 1 else None


def run_convergence(config: ExperimentConfig, resume=False, cache_dir=None, stream=None):
    """Normalized depth statistics on ``config.n_grid``; returns the CSV rows."""
    spec = _attachment(config)
    refs = convergence_references(spec, config.k)
    done = _completed_grid_points(config.output_path) if resume else set()
    writer = RowWriter(config.output_path, append=resume, stream=stream)
    pool = _pool(config)
    rows = []
    try:
        for g, n in enumerate(config.n_grid):
            if n < 2:
                raise DomainError("convergence grid needs n >= 2 (log n > 0)")
            if n in done:
                continue
            dn, mh, mx = _depth_samples(config, g, n, spec, pool, cache_dir)
            logn = math.log(n)
            block = []
            for stat, vals in (
                ("dn_over_logn", dn), ("minhalf_over_logn", mh), ("maxall_over_logn", mx)
            ):
                s = StatSummary()
                s.extend(vals / logn)
                block.append(summary_row("convergence", n, config.k, spec.label(), stat, s, refs[stat]))
            writer.write(block)
            rows.extend(block)
    finally:
        writer.close()
        if pool:
            pool.shutdown()
    return rows


def run_oracle_check(config: ExperimentConfig, stream=None):
    """Monte Carlo depth statistics next to exact enumeration means (uniform only)."""
    spec = _attachment(config)
    if spec.kind != "uniform":
        raise SpecError("the exact oracle covers uniform attachment only")
    writer = RowWriter(config.output_path, stream=stream)
    pool = _pool(config)
    rows = []
    try:
        for g, n in enumerate(config.n_grid):
            exact = exact_depths(n, config.k)
            dn, mh, mx = _depth_samples(config, g, n, spec, pool)
            block = []
            for stat, vals, ref in (
                ("dn", dn, exact.mean_dn), ("minhalf", mh, exact.mean_min_half),
                ("maxall", mx, exact.mean_max_all),
            ):
                s = StatSummary()
                s.extend(vals)
                block.append(summary_row("oracle_check", n, config.k, spec.label(), stat, s, float(ref)))
            writer.write(block)
            rows.extend(block)
    finally:
        writer.close()
        if pool:
            pool.shutdown()
    return rows


def run_brw_tails(config: ExperimentConfig, stream=None):
    """Right/left tail studies of BRW minima with constants and config attached.

    Returns ``{"config", "constants", "tails": {side: TailEstimate JSON}, "rows"}``;
    a side that lacks hits carries ``"error"`` alongside its raw counts.
    """
    spec = config.parsed_spec
    step = spec if isinstance(spec, StepSpec) else StepSpec.from_attachment(spec)
    g = brw.gamma(step, config.k)
    try:
        constants = limit_constants(spec, config.k).to_json()
    except NoRootError:
        # lambda_k is infinite for some lattices; the tails only need gamma
        constants = {"k": config.k, "lambda_k": None, "gamma": g, "mean_y": step.mean}
    writer = RowWriter(config.output_path, stream=stream)
    out = {"config": config.to_json(), "constants": constants, "tails": {}}
    rows = []
    try:
        for side, eps in (("right", config.eps_right), ("left", config.eps_left)):
            if eps is None:
                continue

            def record(m, hit, side=side):
                s = StatSummary()
                s.extend(hit.astype(float))
                row = summary_row("brw_tails", m, config.k, step.label(), f"{side}_tail_hit", s, None)
                writer.write([row])
                rows.append(row)

            try:
                est = brw.tail_study(
                    side, step, config.k, eps, config.m_grid, config.replications,
                    config.master_seed, on_indicators=record,
                )
                out["tails"][side] = est.to_json()
            except UnderpoweredError as exc:
                out["tails"][side] = dict(exc.estimate.to_json(), error=str(exc))
    finally:
        writer.close()
    out["rows"] = rows
    return out


def run(config: ExperimentConfig, **kw):
    if config.experiment == "convergence":
        return run_convergence(config, **kw)
    if config.experiment == "oracle_check":
        return run_oracle_check(config, **kw)
    return run_brw_tails(config, **kw)

