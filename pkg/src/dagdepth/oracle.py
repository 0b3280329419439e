"""Exact depth statistics of small uniform random recursive DAGs.

Every parent configuration of the DAG on ``0..n`` (node ``x`` picks ``k``
parents uniformly in ``0..x-1``) is equally likely, so exact laws follow from
counting configurations.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional

from . import _backend
from .errors import BudgetError, DomainError

DEFAULT_BUDGET = 10**8


@dataclass(frozen=True)
class ExactDepthResult:
    n: int
    k: int
    dist_dn: Dict[int, Fraction]
    dist_min_half: Dict[int, Fraction]
    dist_max_all: Dict[int, Fraction]
    configs_enumerated: int

    @staticmethod
    def _mean(dist):
        return sum((d * p for d, p in dist.items()), Fraction(0))

    @property
    def mean_dn(self) -> Fraction:
        return self._mean(self.dist_dn)

    @property
    def mean_min_half(self) -> Fraction:
        return self._mean(self.dist_min_half)

    @property
    def mean_max_all(self) -> Fraction:
        return self._mean(self.dist_max_all)

    def to_json(self):
        """Exact values as fraction strings, e.g. ``"7/4"``."""

        def dist(d):
            return {str(depth): str(p) for depth, p in sorted(d.items())}

        return {
            "n": self.n,
            "k": self.k,
            "mean_dn": str(self.mean_dn),
            "mean_min_half": str(self.mean_min_half),
            "mean_max_all": str(self.mean_max_all),
            "mean_dn_float": float(self.mean_dn),
            "mean_min_half_float": float(self.mean_min_half),
            "mean_max_all_float": float(self.mean_max_all),
            "dist_dn": dist(self.dist_dn),
            "dist_min_half": dist(self.dist_min_half),
            "dist_max_all": dist(self.dist_max_all),
            "configs_enumerated": self.configs_enumerated,
        }

    @classmethod
    def from_json(cls, obj):
        def dist(d):
            return {int(depth): Fraction(p) for depth, p in d.items()}

        return cls(
            n=obj["n"],
            k=obj["k"],
            dist_dn=dist(obj["dist_dn"]),
            dist_min_half=dist(obj["dist_min_half"]),
            dist_max_all=dist(obj["dist_max_all"]),
            configs_enumerated=obj["configs_enumerated"],
        )


def configuration_count(n: int, k: int) -> int:
    total = 1
    for x in range(1, n + 1):
        total *= x**k
    return total


def exact_depths(
    n: int, k: int, budget: int = DEFAULT_BUDGET, backend: Optional[str] = None
) -> ExactDepthResult:
    """Enumerate all ``prod_x x**k`` parent configurations with a mixed-radix counter."""
    if n < 1 or k < 1:
        raise DomainError("need n >= 1 and k >= 1")
    total = configuration_count(n, k)
    if total > budget:
        raise BudgetError(f"{total} configurations exceed the budget {budget}")
    cnt_dn, cnt_min, cnt_max, configs = _backend.kernels(backend).enumerate_depths(n, k)
    if configs != total:
        raise RuntimeError(f"enumerated {configs} configurations, expected {total}")

    def dist(counts):
        return {d: Fraction(int(c), total) for d, c in enumerate(counts) if c}

    return ExactDepthResult(
        n=n,
        k=k,
        dist_dn=dist(cnt_dn),
        dist_min_half=dist(cnt_min),
        dist_max_all=dist(cnt_max),
        configs_enumerated=total,
    )


def dump_golden(results, path) -> None:
    with open(path, "w") as fh:
        json.dump([r.to_json() for r in results], fh, indent=2)
        fh.write("\n")


def load_golden(path):
    with open(path) as fh:
        return [ExactDepthResult.from_json(obj) for obj in json.load(fh)]
