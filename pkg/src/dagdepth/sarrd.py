"""Scaled-attachment random recursive DAGs.

Node ``x >= 1`` picks ``k`` parents ``floor(x * X_{x,p})`` with ``X`` drawn
from an :class:`~dagdepth.attachment.AttachmentSpec`; its depth is the number
of edges on the longest path to the root ``0``.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import _backend
from .attachment import AttachmentSpec, sample_array
from .errors import BudgetError, CapacityError, DomainError, EmptyError, RootError, SpecError
from .rng import generator

MAX_NODES = 2**31 - 1
DEFAULT_MEMORY_BUDGET = 4 * 2**30  # bytes
CHUNK = 1 << 20
IDEAL_TREE_CAP = 1 << 24

_HEADER = struct.Struct("<qqQ")  # n, k, seed


@dataclass(frozen=True, eq=False)
class DepthProfile:
    """Longest-path depths ``D_0..D_n`` of one realization.

    ``parents`` has shape ``(n + 1, k)`` with row 0 set to -1, and is present
    only when requested at generation time.
    """

    n: int
    k: int
    depths: np.ndarray
    seed: int
    parents: Optional[np.ndarray] = None
    spec: Optional[AttachmentSpec] = None


@dataclass(frozen=True)
class DepthStats:
    d_n: int
    min_half: int
    max_all: int


def _parents_block(start, stop, k, spec, rng):
    x = np.arange(start, stop, dtype=np.float64)
    xs = sample_array(spec, rng, (stop - start, k))
    par = np.floor(x[:, None] * xs).astype(np.int64)
    # x * X can round up to x when X is within an ulp of 1
    np.minimum(par, (x - 1).astype(np.int64)[:, None], out=par)
    return par


def generate_depths(
    n: int,
    k: int,
    spec: AttachmentSpec,
    seed: int,
    store_parents: bool = False,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    backend: Optional[str] = None,
) -> DepthProfile:
    """Simulate one DAG on ``0..n`` and return its depth profile.

    Variates are drawn node by node, ``k`` per node, from a PCG64 stream
    seeded with ``seed``; the result depends only on ``(n, k, spec, seed)``.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    if k < 1:
        raise DomainError("k must be >= 1")
    if not math.isfinite(spec.density_bound):
        raise SpecError(
            f"attachment {spec.label()} has unbounded density; depth laws need a bounded density"
        )
    if n > MAX_NODES:
        raise CapacityError(f"n = {n} exceeds the 32-bit depth index cap {MAX_NODES}")
    need = 4 * (n + 1) * (1 + (k if store_parents else 0))
    if need > memory_budget:
        raise CapacityError(f"n = {n} needs {need} bytes, budget is {memory_budget}")

    kern = _backend.kernels(backend)
    rng = generator(seed)
    depths = np.zeros(n + 1, dtype=np.int32)
    parents = None
    if store_parents:
        parents = np.empty((n + 1, k), dtype=np.int32)
        parents[0] = -1
    for start in range(1, n + 1, CHUNK):
        stop = min(start + CHUNK, n + 1)
        par = _parents_block(start, stop, k, spec, rng)
        kern.fill_depths(depths, par, start)
        if store_parents:
            parents[start:stop] = par
    return DepthProfile(n=n, k=k, depths=depths, seed=seed, parents=parents, spec=spec)


def profile_from_parents(parents, seed: int = 0) -> DepthProfile:
    """Depth profile of an explicit DAG; ``parents[x]`` lists the parents of x >= 1.

    Row 0 is ignored. Every parent must be smaller than its child.
    """
    par = np.asarray(parents, dtype=np.int64)
    if par.ndim != 2:
        raise DomainError("parents must be a 2-d array of shape (n + 1, k)")
    n, k = par.shape[0] - 1, par.shape[1]
    body = par[1:]
    idx = np.arange(1, n + 1)[:, None]
    if n and (body.min() < 0 or (body >= idx).any()):
        raise DomainError("every parent must satisfy 0 <= parent < child")
    depths = np.zeros(n + 1, dtype=np.int32)
    d = [0] * (n + 1)
    for x in range(1, n + 1):
        d[x] = 1 + max(d[p] for p in body[x - 1])
    depths[:] = d
    stored = par.astype(np.int32)
    stored[0] = -1
    return DepthProfile(n=n, k=k, depths=depths, seed=seed, parents=stored)


def depth_stats(profile: DepthProfile) -> DepthStats:
    """D_n, min of D_x over ceil(n/2) <= x <= n, and max over all nodes."""
    n = profile.n
    if n < 1:
        raise EmptyError("depth statistics need n >= 1")
    d = profile.depths
    lo = (n + 1) // 2
    return DepthStats(d_n=int(d[n]), min_half=int(d[lo:].min()), max_all=int(d.max()))


def _parse_word(s, k):
    letters = [int(ch) for ch in s]
    for p in letters:
        if not 1 <= p <= k:
            raise DomainError(f"letter {p} outside the alphabet 1..{k}")
    return letters


def ancestor_label(profile: DepthProfile, x: int, s: Union[str, Sequence[int]]) -> int:
    """Label reached from ``x`` by following parent choices spelled by ``s``.

    ``s`` is a word over ``1..k`` (a string like ``"12"`` or a list of ints).
    """
    if profile.parents is None:
        raise DomainError("profile was generated without stored parents")
    if not 0 <= x <= profile.n:
        raise DomainError(f"node {x} outside 0..{profile.n}")
    label = x
    for i, p in enumerate(_parse_word(s, profile.k)):
        if label == 0:
            raise RootError(f"reached the root after {i} letters of {s!r}")
        label = int(profile.parents[label, p - 1])
    return label


class BlockGreedyResult(tuple):
    """``(labels, reached_zero_at)`` with attribute access."""

    __slots__ = ()

    def __new__(cls, labels, reached_zero_at):
        return super().__new__(cls, (labels, reached_zero_at))

    @property
    def labels(self):
        return self[0]

    @property
    def reached_zero_at(self):
        return self[1]


def ideal_tree_block_greedy(
    n: int, k: int, spec: AttachmentSpec, ell: int, q: int, seed: int
) -> BlockGreedyResult:
    """Block-greedy walk in the ideal (collision-free) ancestor tree.

    From ``V_0 = n``, each step draws fresh variates on every edge of the
    depth-``ell`` subtree under the current label and moves to the largest
    label among its ``k**ell`` leaves (first maximizing word in lexicographic
    order). Stops early when a step lands on 0.
    """
    if ell < 1 or q < 0 or k < 1 or n < 0:
        raise DomainError("need ell >= 1, q >= 0, k >= 1, n >= 0")
    if k**ell > IDEAL_TREE_CAP:
        raise BudgetError(f"k**ell = {k**ell} exceeds the enumeration cap {IDEAL_TREE_CAP}")
    rng = generator(seed)
    labels = [n]
    reached = None
    v = n
    for j in range(q):
        level = np.array([v], dtype=np.int64)
        for _ in range(ell):
            parent = np.repeat(level, k)
            xs = sample_array(spec, rng, parent.size)
            child = np.floor(parent * xs).astype(np.int64)
            level = np.minimum(child, np.maximum(parent - 1, 0))
        v = int(level.max())
        labels.append(v)
        if v == 0:
            reached = j + 1
            break
    return BlockGreedyResult(np.array(labels, dtype=np.int64), reached)


def save_depths(profile: DepthProfile, path) -> None:
    """Write ``(n, k, seed)`` header then little-endian int32 depths."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(profile.n, profile.k, profile.seed))
        fh.write(profile.depths.astype("<i4").tobytes())


def load_depths(path, spec: Optional[AttachmentSpec] = None) -> DepthProfile:
    with open(path, "rb") as fh:
        n, k, seed = _HEADER.unpack(fh.read(_HEADER.size))
        depths = np.frombuffer(fh.read(), dtype="<i4").astype(np.int32)
    if depths.size != n + 1:
        raise ValueError(f"{path}: expected {n + 1} depths, found {depths.size}")
    return DepthProfile(n=n, k=k, depths=depths, seed=seed, spec=spec)
