"""Minima of branching random walks with constant branching ``k``.

Each tree node ``u`` carries a step ``Y_u`` derived from a counter-based
uniform keyed by the node's index in the full k-ary tree (root 0, children of
``i`` at ``k*i + 1 .. k*i + k``). The sampled tree therefore does not depend
on how a search visits it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

import numpy as np

from . import _backend
from .attachment import StepSpec, as_step, lattice_tables, sample_steps
from .constants import DEFAULT_TOL, gamma, legendre
from .errors import BudgetError, DomainError, SpecError, UnderpoweredError
from .rng import derive_seeds, node_uniforms, stream_key

LATTICE_TABLE_BUDGET = 10**7
MIN_HITS = 10
MIN_FIT_POINTS = 3


@dataclass(frozen=True)
class BrwMinResult:
    m: int
    k: int
    min_value: float
    nodes_visited: int
    seed: int


def _kernel_args(spec):
    step = as_step(spec).resolved()
    if step.kind == "exponential":
        return 0, float(step.rate), np.zeros(1), np.ones(1)
    sup, cdf = lattice_tables(step)
    return 1, 1.0, sup, cdf


def _check_tree(k, m):
    if k < 1 or m < 0:
        raise DomainError("need k >= 1 and m >= 0")
    # node indices of generation m must fit in 64 bits
    if m > 0 and (m + 1) * math.log2(max(k, 2)) >= 63:
        raise BudgetError(f"a {k}-ary tree of depth {m} overflows 64-bit node indices")


def simulate_min(
    spec: StepSpec, k: int, m: int, seed: int, prune: bool = True, backend: Optional[str] = None
) -> BrwMinResult:
    """Exact minimum position ``M_m`` over the ``k**m`` nodes of generation ``m``."""
    step = as_step(spec)
    _check_tree(k, m)
    kind, rate, sup, cdf = _kernel_args(step)
    value, visited = _backend.kernels(backend).brw_min(
        np.uint64(stream_key(seed)), k, m, kind, rate, sup, cdf, prune, math.inf, False
    )
    return BrwMinResult(m=m, k=k, min_value=float(value), nodes_visited=int(visited), seed=seed)


def replication_seeds(seed: int, reps: int, stream: int = 0) -> np.ndarray:
    """Seeds of replications ``0..reps-1`` in stream ``stream`` (grid index)."""
    idx = (np.uint64(stream) << np.uint64(32)) + np.arange(reps, dtype=np.uint64)
    return derive_seeds(seed, idx)


def _keys(seeds):
    return np.array([stream_key(int(s)) for s in seeds], dtype=np.uint64)


def sample_minima(
    spec: StepSpec,
    k: int,
    m: int,
    reps: int,
    seed: int,
    stream: int = 0,
    prune: bool = True,
    backend: Optional[str] = None,
) -> np.ndarray:
    """``reps`` independent draws of ``M_m``; replication ``r`` uses seed
    ``replication_seeds(seed, reps, stream)[r]``."""
    _check_tree(k, m)
    kind, rate, sup, cdf = _kernel_args(spec)
    keys = _keys(replication_seeds(seed, reps, stream))
    mins, _ = _backend.kernels(backend).brw_min_batch(
        keys, k, m, kind, rate, sup, cdf, prune, math.inf, False
    )
    return mins


def tail_indicators(
    spec: StepSpec,
    k: int,
    m: int,
    reps: int,
    seed: int,
    side: str,
    threshold: float,
    stream: int = 0,
    backend: Optional[str] = None,
) -> np.ndarray:
    """Boolean draws of ``M_m >= threshold`` (right) or ``M_m <= threshold`` (left).

    Uses the same trees as :func:`sample_minima` but starts the search with
    the threshold as incumbent: the right event holds iff no leaf falls below
    it, the left event iff some leaf reaches it, so most of the tree is cut.
    """
    _check_tree(k, m)
    kind, rate, sup, cdf = _kernel_args(spec)
    keys = _keys(replication_seeds(seed, reps, stream))
    kern = _backend.kernels(backend)
    if side == "right":
        vals, _ = kern.brw_min_batch(keys, k, m, kind, rate, sup, cdf, True, threshold, True)
        return vals >= threshold
    if side == "left":
        cap = math.nextafter(threshold, math.inf)
        vals, _ = kern.brw_min_batch(keys, k, m, kind, rate, sup, cdf, True, cap, True)
        return vals <= threshold
    raise DomainError(f"side must be 'right' or 'left', got {side!r}")


def path_position(spec: StepSpec, k: int, seed: int, word) -> float:
    """Position ``S_u`` of the node spelled by ``word`` (letters ``1..k``)."""
    ids = []
    nid = 0
    for p in word:
        if not 1 <= p <= k:
            raise DomainError(f"letter {p} outside 1..{k}")
        nid = nid * k + p
        ids.append(nid)
    if not ids:
        return 0.0
    u = node_uniforms(stream_key(seed), ids)
    total = 0.0
    for y in sample_steps(as_step(spec), u):
        total += float(y)
    return total


# -- exact lattice oracle ---------------------------------------------------


@dataclass(frozen=True)
class LatticeMinCDF:
    """``cdf[i] = P(M_m <= values[i])`` on the lattice ``values = i * unit``."""

    m: int
    k: int
    unit: float
    values: np.ndarray
    cdf: np.ndarray

    def at(self, t: float) -> float:
        if t < 0:
            return 0.0
        i = int(math.floor(t / self.unit + 1e-9))
        return float(self.cdf[min(i, self.cdf.size - 1)])


def _integer_lattice(support):
    fracs = [Fraction(s).limit_denominator(10**6) for s in support]
    for s, f in zip(support, fracs):
        if abs(float(f) - s) > 1e-9 * max(1.0, s):
            raise SpecError(f"support point {s} is not a rational with small denominator")
    den = 1
    for f in fracs:
        den = den * f.denominator // math.gcd(den, f.denominator)
    ints = [int(f * den) for f in fracs]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    g = g or 1
    return [v // g for v in ints], float(Fraction(g, den))


def exact_lattice_min_cdf(spec: StepSpec, k: int, m: int) -> LatticeMinCDF:
    """Exact law of ``M_m`` for lattice steps via the survival recursion

    ``G_m(t) = (sum_y p_y G_{m-1}(t - y))**k``, ``G_0(t) = 1{t < 0}``,
    where ``G_m(t) = P(M_m > t)``.
    """
    step = as_step(spec)
    if step.kind != "lattice":
        raise SpecError("exact oracle needs a lattice step law")
    if k < 1 or m < 0:
        raise DomainError("need k >= 1 and m >= 0")
    sup, pr = step.atoms()
    ints, unit = _integer_lattice(list(sup))
    size = m * max(ints) + 1
    if size > LATTICE_TABLE_BUDGET:
        raise BudgetError(f"lattice table of {size} entries exceeds {LATTICE_TABLE_BUDGET}")
    surv = np.zeros(size)  # G_0 on t = 0..size-1
    for _ in range(m):
        mix = np.zeros(size)
        for y, p in zip(ints, pr):
            # G(t - y) is 1 for t < y
            mix[:y] += p
            mix[y:] += p * surv[: size - y]
        surv = mix**k
    return LatticeMinCDF(m=m, k=k, unit=unit, values=np.arange(size) * unit, cdf=1.0 - surv)


# -- tail estimates ---------------------------------------------------------


@dataclass
class TailRow:
    m: int
    hits: int
    reps: int

    @property
    def p_hat(self):
        return self.hits / self.reps

    @property
    def se(self):
        p = self.p_hat
        return math.sqrt(p * (1 - p) / self.reps)

    def to_json(self):
        return {"m": self.m, "hits": self.hits, "reps": self.reps, "p_hat": self.p_hat, "se": self.se}


@dataclass
class TailEstimate:
    side: str
    eps: float
    rows: List[TailRow] = field(default_factory=list)
    fitted_rate: Optional[float] = None
    theory_rate: Optional[float] = None
    gamma: Optional[float] = None

    @property
    def m_grid(self):
        return [r.m for r in self.rows]

    @property
    def probabilities(self):
        return [(r.p_hat, r.se) for r in self.rows]

    def to_json(self):
        return {
            "side": self.side,
            "eps": self.eps,
            "rows": [r.to_json() for r in self.rows],
            "fitted_rate": self.fitted_rate,
            "theory_rate": self.theory_rate,
        }


def fit_rate(rows, min_hits=MIN_HITS):
    """Least-squares slope of ``-log p_hat`` against ``m`` over rows with enough hits."""
    good = [r for r in rows if r.hits >= min_hits]
    if len(good) < MIN_FIT_POINTS:
        return None
    ms = np.array([r.m for r in good], dtype=float)
    y = -np.log([r.p_hat for r in good])
    slope, _ = np.polyfit(ms, y, 1)
    return float(slope)


def right_theory_rate(spec, k, eps):
    step = as_step(spec).resolved()
    if step.kind != "exponential":
        return None
    return k * step.rate * eps


def left_theory_rate(spec, k, eps, tol=DEFAULT_TOL):
    g = gamma(spec, k, tol)
    if not 0 < eps < g:
        raise DomainError(f"left tail needs 0 < eps < gamma = {g:.6g}, got eps = {eps}")
    return legendre(spec, g - eps, tol) - math.log(k)


def tail_threshold(side, m, g, eps):
    return (g + eps) * m if side == "right" else (g - eps) * m


def finish_estimate(est: TailEstimate) -> TailEstimate:
    est.fitted_rate = fit_rate(est.rows)
    if est.fitted_rate is None:
        raise UnderpoweredError(
            f"{est.side} tail: fewer than {MIN_FIT_POINTS} grid points with >= {MIN_HITS} hits "
            f"(hits = {[r.hits for r in est.rows]})",
            estimate=est,
        )
    return est


def tail_study(side, spec, k, eps, m_grid, reps, seed, on_indicators=None, backend=None):
    """Tail probabilities on ``m_grid`` with a fitted exponential rate.

    Grid point ``i`` uses replication stream ``i``. ``on_indicators(m, hits)``
    receives each boolean hit array as it is produced.
    """
    if side not in ("right", "left"):
        raise DomainError(f"side must be 'right' or 'left', got {side!r}")
    if eps <= 0:
        raise DomainError("eps must be positive")
    if list(m_grid) != sorted(set(m_grid)):
        raise DomainError("m_grid must be strictly increasing")
    g = gamma(spec, k)
    if side == "right":
        theory = right_theory_rate(spec, k, eps)
    else:
        theory = left_theory_rate(spec, k, eps)
    est = TailEstimate(side=side, eps=eps, theory_rate=theory, gamma=g)
    if theory is not None:
        expected = [reps * math.exp(-theory * m) for m in m_grid]
        if sum(e >= MIN_HITS for e in expected) < MIN_FIT_POINTS:
            raise UnderpoweredError(
                f"{side} tail: {reps} reps give expected hits {[round(e, 1) for e in expected]}",
                estimate=est,
            )
    for i, m in enumerate(m_grid):
        hit = tail_indicators(
            spec, k, m, reps, seed, side, tail_threshold(side, m, g, eps), stream=i, backend=backend
        )
        est.rows.append(TailRow(m, int(hit.sum()), reps))
        if on_indicators is not None:
            on_indicators(m, hit)
    return finish_estimate(est)


def right_tail_estimate(spec, k, eps, m_grid, reps, seed, backend=None) -> TailEstimate:
    """Estimate ``P(M_m >= (gamma + eps) m)`` on ``m_grid`` and fit its exponential rate.

    The reference rate ``k * alpha * eps`` is reported only for exponential steps.
    """
    return tail_study("right", spec, k, eps, m_grid, reps, seed, backend=backend)


def left_tail_estimate(spec, k, eps, m_grid, reps, seed, backend=None) -> TailEstimate:
    """Estimate ``P(M_m <= (gamma - eps) m)``; reference rate ``legendre(gamma - eps) - log k``."""
    return tail_study("left", spec, k, eps, m_grid, reps, seed, backend=backend)
