"""Seed derivation and counter-based uniforms.

Replication streams are seeded with ``derive_seed(master, index)``; each
replication then owns a ``numpy.random.Generator`` (PCG64). Branching random
walk variates are instead *keyed by node*: the uniform attached to tree node
``i`` is ``finalize(key + (i + 1) * GOLDEN)``, i.e. the i-th output of a
splitmix64 stream. This makes a pruned search and a full enumeration see the
same tree.
"""
import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV53 = 1.0 / (1 << 53)


def mix64(z):
    """splitmix64 finalizer on a Python int; a bijection of 64-bit words."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed, stream_index):
    """Seed for replication stream ``stream_index`` under ``master_seed``.

    Two mixing rounds: one over the master seed, one over the master digest
    combined with the index. For a fixed master the map is a bijection of
    the index, so distinct indices never collide.
    """
    h = mix64(master_seed)
    return mix64(h + ((stream_index + 1) * GOLDEN))


def _mix64_array(z):
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_M1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def derive_seeds(master_seed, indices):
    """Vectorized :func:`derive_seed` over an array of stream indices."""
    idx = np.asarray(indices, dtype=np.uint64)
    h = np.uint64(mix64(master_seed))
    return _mix64_array(h + (idx + np.uint64(1)) * np.uint64(GOLDEN))


def stream_key(seed):
    """Key for node-indexed uniforms of one replication."""
    return mix64(seed ^ 0x5851F42D4C957F2D)


def node_uniforms(key, node_ids):
    """Uniforms in [0, 1) attached to ``node_ids`` under ``key``."""
    ids = np.asarray(node_ids, dtype=np.uint64)
    z = _mix64_array(np.uint64(key) + (ids + np.uint64(1)) * np.uint64(GOLDEN))
    return (z >> np.uint64(11)).astype(np.float64) * _INV53


def generator(seed):
    return np.random.Generator(np.random.PCG64(seed))
