"""Pure numpy / Python kernels, used when numba is disabled or absent.

Results match ``_kernels_nb`` exactly, except ``nodes_visited`` which counts
the nodes touched by a different search order.
"""
import numpy as np

from .attachment import neg_log1m
from .rng import GOLDEN, _mix64_array

_INV53 = 1.0 / 9007199254740992.0


def fill_depths(depths, parents, start):
    d = depths[:start].tolist()
    for row in parents.tolist():
        d.append(1 + max(d[p] for p in row))
    depths[start:start + len(parents)] = d[start:]


def _steps(key, ids, kind, rate, sup, cdf):
    z = _mix64_array(np.uint64(key) + (ids + np.uint64(1)) * np.uint64(GOLDEN))
    u = (z >> np.uint64(11)).astype(np.float64) * _INV53
    if kind == 0:
        return neg_log1m(u) / rate
    i = np.searchsorted(cdf, u, side="right")
    return sup[np.minimum(i, sup.shape[0] - 1)]


def brw_min(key, k, m, kind, rate, sup, cdf, prune, bound, stop_below):
    """Level-synchronous search seeded by a greedy descent.

    The greedy leaf is an attained value, so every node at or above it can be
    dropped without changing the minimum. Returns ``(min(M_m, bound), visited)``;
    ``stop_below`` is accepted for signature parity (the minimum is exact anyway).
    """
    if m == 0:
        return min(0.0, bound), 0
    uk = np.uint64(k)
    offsets = np.arange(1, k + 1, dtype=np.uint64)
    visited = 0
    if prune:
        nid = np.zeros(1, dtype=np.uint64)
        s = np.zeros(1)
        for _ in range(m):
            cids = nid * uk + offsets
            cs = s + _steps(key, cids, kind, rate, sup, cdf)
            j = int(np.argmin(cs))
            nid, s = cids[j:j + 1], cs[j:j + 1]
            visited += k
        bound = min(bound, float(s[0]))

    ids = np.zeros(1, dtype=np.uint64)
    sums = np.zeros(1)
    for level in range(m):
        cids = (ids[:, None] * uk + offsets[None, :]).ravel()
        cs = (sums[:, None] + _steps(key, cids, kind, rate, sup, cdf).reshape(-1, k)).ravel()
        visited += cids.size
        if prune:
            keep = cs < bound
            cids, cs = cids[keep], cs[keep]
        ids, sums = cids, cs
        if ids.size == 0:
            break
    if sums.size:
        bound = min(bound, float(sums.min()))
    return bound, visited


def brw_min_batch(keys, k, m, kind, rate, sup, cdf, prune, bound, stop_below):
    n = keys.shape[0]
    mins = np.empty(n)
    visited = np.empty(n, dtype=np.int64)
    for r in range(n):
        mins[r], visited[r] = brw_min(
            int(keys[r]), k, m, kind, rate, sup, cdf, prune, bound, stop_below
        )
    return mins, visited


def enumerate_depths(n, k):
    par = [[0] * k for _ in range(n + 1)]
    depths = [0] * (n + 1)
    cnt_dn = np.zeros(n + 1, dtype=np.int64)
    cnt_min = np.zeros(n + 1, dtype=np.int64)
    cnt_max = np.zeros(n + 1, dtype=np.int64)
    lo = (n + 1) // 2
    first = 1
    configs = 0
    while True:
        for x in range(first, n + 1):
            depths[x] = 1 + max(depths[p] for p in par[x])
        configs += 1
        cnt_dn[depths[n]] += 1
        cnt_min[min(depths[lo:])] += 1
        cnt_max[max(depths)] += 1
        x, p = n, k - 1
        while x >= 1:
            par[x][p] += 1
            if par[x][p] < x:
                break
            par[x][p] = 0
            p -= 1
            if p < 0:
                p = k - 1
                x -= 1
        if x == 0:
            break
        first = x
    return cnt_dn, cnt_min, cnt_max, configs
