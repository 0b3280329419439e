"""Streaming summaries for Monte Carlo output."""
from __future__ import annotations

import math

import numpy as np

QUANTILE_LEVELS = (0.05, 0.25, 0.5, 0.75, 0.95)
RETENTION_CAP = 10**6


class P2Quantile:
    """P-square single-quantile estimator (Jain & Chlamtac), warm-startable.

    Used only once the retained sample overflows ``RETENTION_CAP``.
    """

    def __init__(self, p, sample):
        self.p = p
        xs = np.sort(np.asarray(sample, dtype=float))
        n = xs.size
        if n < 5:
            raise ValueError("P2 needs at least 5 initial values")
        levels = np.array([0.0, p / 2, p, (1 + p) / 2, 1.0])
        self.q = list(np.quantile(xs, levels))
        self.pos = [1 + lv * (n - 1) for lv in levels]
        self.dn = list(levels)
        self.desired = [1 + lv * (n - 1) for lv in levels]
        self.pos[0], self.pos[-1] = 1.0, float(n)

    def add(self, x):
        q, pos = self.q, self.pos
        if x < q[0]:
            q[0] = x
            cell = 0
        elif x >= q[4]:
            q[4] = x
            cell = 3
        else:
            cell = next(i for i in range(4) if q[i] <= x < q[i + 1])
        for i in range(cell + 1, 5):
            pos[i] += 1
        for i in range(5):
            self.desired[i] += self.dn[i]
        for i in (1, 2, 3):
            d = self.desired[i] - pos[i]
            if (d >= 1 and pos[i + 1] - pos[i] > 1) or (d <= -1 and pos[i - 1] - pos[i] < -1):
                s = 1 if d > 0 else -1
                cand = self._parabolic(i, s)
                if not q[i - 1] < cand < q[i + 1]:
                    cand = q[i] + s * (q[i + s] - q[i]) / (pos[i + s] - pos[i])
                q[i] = cand
                pos[i] += s

    def _parabolic(self, i, s):
        q, n = self.q, self.pos
        return q[i] + s / (n[i + 1] - n[i - 1]) * (
            (n[i] - n[i - 1] + s) * (q[i + 1] - q[i]) / (n[i + 1] - n[i])
            + (n[i + 1] - n[i] - s) * (q[i] - q[i - 1]) / (n[i] - n[i - 1])
        )

    @property
    def value(self):
        return self.q[2]


class StatSummary:
    """Count, mean, variance (Welford/Chan), extrema and quantiles.

    Quantiles are exact (numpy's linear interpolation) while the sample fits
    under ``cap``; past it they switch to P-square estimates warm-started
    from the retained values.
    """

    def __init__(self, cap=RETENTION_CAP):
        self.cap = cap
        self.count = 0
        self.mean = 0.0
        self._m2 = 0.0
        self.min = math.inf
        self.max = -math.inf
        self._kept = []
        self._p2 = None

    def add(self, x):
        self.extend(np.array([x], dtype=float))

    def extend(self, values):
        xs = np.asarray(values, dtype=float).ravel()
        if xs.size == 0:
            return
        nb = xs.size
        mb = float(xs.mean())
        m2b = float(((xs - mb) ** 2).sum())
        na = self.count
        n = na + nb
        delta = mb - self.mean
        self.mean += delta * nb / n
        self._m2 += m2b + delta * delta * na * nb / n
        self.count = n
        self.min = min(self.min, float(xs.min()))
        self.max = max(self.max, float(xs.max()))
        if self._p2 is None and n <= self.cap:
            self._kept.append(xs)
            return
        if self._p2 is None:
            room = self.cap - na
            self._kept.append(xs[:room])
            seed = np.concatenate(self._kept)
            self._p2 = [P2Quantile(p, seed) for p in QUANTILE_LEVELS]
            self._kept = []
            xs = xs[room:]
        for x in xs.tolist():
            for est in self._p2:
                est.add(x)

    @property
    def variance(self):
        """Unbiased sample variance (0 for fewer than two values)."""
        return self._m2 / (self.count - 1) if self.count > 1 else 0.0

    @property
    def exact_quantiles(self):
        return self._p2 is None

    def quantiles(self):
        if self.count == 0:
            return tuple(math.nan for _ in QUANTILE_LEVELS)
        if self._p2 is not None:
            qs = [min(max(e.value, self.min), self.max) for e in self._p2]
            return tuple(np.maximum.accumulate(qs).tolist())
        xs = np.concatenate(self._kept)
        return tuple(float(v) for v in np.quantile(xs, QUANTILE_LEVELS))

    @property
    def median(self):
        return self.quantiles()[2]

    def to_json(self):
        q = self.quantiles()
        return {
            "count": self.count,
            "mean": self.mean,
            "variance": self.variance,
            "min": self.min,
            "max": self.max,
            "q05": q[0],
            "q25": q[1],
            "q50": q[2],
            "q75": q[3],
            "q95": q[4],
        }
