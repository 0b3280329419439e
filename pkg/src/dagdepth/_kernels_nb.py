"""numba kernels. Signatures mirror ``_kernels_np``."""
import os

import numba
import numpy as np
from numba import njit, prange

if "NUMBA_THREADING_LAYER" not in os.environ:
    # skip the TBB probe, which warns on old TBB builds
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0


@njit(cache=True, nogil=True)
def fill_depths(depths, parents, start):
    """depths[start + i] = 1 + max_p depths[parents[i, p]]."""
    count, k = parents.shape
    for i in range(count):
        best = 0
        for p in range(k):
            d = depths[parents[i, p]]
            if d > best:
                best = d
        depths[start + i] = best + 1


@njit(cache=True, nogil=True, inline="always")
def _node_uniform(key, nid):
    z = key + (nid + _ONE) * _GOLDEN
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    z = z ^ (z >> _S31)
    return np.float64(z >> _S11) * _INV53


@njit(cache=True, nogil=True, inline="always")
def _step(key, nid, kind, rate, sup, cdf):
    u = _node_uniform(key, nid)
    if kind == 0:
        return -np.log1p(-u) / rate
    i = np.searchsorted(cdf, u, side="right")
    if i >= sup.shape[0]:
        i = sup.shape[0] - 1
    return sup[i]


@njit(cache=True, nogil=True)
def brw_min(key, k, m, kind, rate, sup, cdf, prune, bound, stop_below):
    """Minimum position at generation ``m`` by depth-first search.

    Children are visited in increasing position; with ``prune`` a sibling run
    is abandoned once its position reaches the incumbent (steps are >= 0).
    The incumbent starts at ``bound``, so the result is ``min(M_m, bound)``;
    with ``stop_below`` the search returns the first leaf found under
    ``bound`` instead of the minimum. Returns ``(value, nodes_visited)``.
    """
    if m == 0:
        return min(0.0, bound), 0
    uk = np.uint64(k)
    sums = np.empty((m, k), dtype=np.float64)
    ids = np.empty((m, k), dtype=np.uint64)
    pos = np.zeros(m, dtype=np.int64)
    best = bound
    visited = 0

    for c in range(k):
        cid = np.uint64(c) + _ONE
        ids[0, c] = cid
        sums[0, c] = _step(key, cid, kind, rate, sup, cdf)
    _sort_level(sums, ids, 0, k)
    level = 0
    while level >= 0:
        if pos[level] >= k:
            level -= 1
            continue
        j = pos[level]
        pos[level] = j + 1
        s = sums[level, j]
        visited += 1
        if prune and s >= best:
            pos[level] = k
            continue
        if level == m - 1:
            if s < best:
                best = s
                if stop_below:
                    return best, visited
            continue
        base = ids[level, j] * uk + _ONE
        nxt = level + 1
        for c in range(k):
            cid = base + np.uint64(c)
            ids[nxt, c] = cid
            sums[nxt, c] = s + _step(key, cid, kind, rate, sup, cdf)
        _sort_level(sums, ids, nxt, k)
        pos[nxt] = 0
        level = nxt
    return best, visited


@njit(cache=True, nogil=True, inline="always")
def _sort_level(sums, ids, level, k):
    for a in range(1, k):
        s = sums[level, a]
        i = ids[level, a]
        b = a - 1
        while b >= 0 and sums[level, b] > s:
            sums[level, b + 1] = sums[level, b]
            ids[level, b + 1] = ids[level, b]
            b -= 1
        sums[level, b + 1] = s
        ids[level, b + 1] = i


@njit(cache=True, parallel=True)
def brw_min_batch(keys, k, m, kind, rate, sup, cdf, prune, bound, stop_below):
    n = keys.shape[0]
    mins = np.empty(n, dtype=np.float64)
    visited = np.empty(n, dtype=np.int64)
    for r in prange(n):
        mins[r], visited[r] = brw_min(
            keys[r], k, m, kind, rate, sup, cdf, prune, bound, stop_below
        )
    return mins, visited


@njit(cache=True, nogil=True)
def enumerate_depths(n, k):
    """Odometer over all parent configurations of the uniform DAG on 0..n.

    Returns count arrays indexed by depth for D_n, min over ceil(n/2)..n and
    max over 0..n, plus the number of configurations visited.
    """
    par = np.zeros((n + 1, k), dtype=np.int64)
    depths = np.zeros(n + 1, dtype=np.int64)
    cnt_dn = np.zeros(n + 1, dtype=np.int64)
    cnt_min = np.zeros(n + 1, dtype=np.int64)
    cnt_max = np.zeros(n + 1, dtype=np.int64)
    lo = (n + 1) // 2
    first = 1
    configs = 0
    while True:
        for x in range(first, n + 1):
            best = 0
            for p in range(k):
                d = depths[par[x, p]]
                if d > best:
                    best = d
            depths[x] = best + 1
        configs += 1
        cnt_dn[depths[n]] += 1
        mn = depths[lo]
        for x in range(lo + 1, n + 1):
            if depths[x] < mn:
                mn = depths[x]
        cnt_min[mn] += 1
        mx = 0
        for x in range(1, n + 1):
            if depths[x] > mx:
                mx = depths[x]
        cnt_max[mx] += 1
        x = n
        p = k - 1
        while x >= 1:
            par[x, p] += 1
            if par[x, p] < x:
                break
            par[x, p] = 0
            p -= 1
            if p < 0:
                p = k - 1
                x -= 1
        if x == 0:
            break
        first = x
    return cnt_dn, cnt_min, cnt_max, configs
