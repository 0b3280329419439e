"""Wall-clock comparison of the numba and numpy kernels.

    python3 benchmarks/bench_backends.py [--repeat 3]

Each case is run once to warm up (JIT compilation, caches) and then timed
``--repeat`` times; the best time is reported. Both backends must produce
identical results, which is checked along the way.
"""
import argparse
import time

import numpy as np

from dagdepth import AttachmentSpec, StepSpec, exact_depths, generate_depths
from dagdepth._backend import HAVE_NUMBA
from dagdepth.brw import sample_minima


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def _same(a, b):
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


CASES = [
    ("depths n=1e6 k=2 uniform",
     lambda be: generate_depths(10**6, 2, AttachmentSpec.uniform(), 1, backend=be).depths),
    ("depths n=1e5 k=5 power:2",
     lambda be: generate_depths(10**5, 5, AttachmentSpec.power_tail(2.0), 1, backend=be).depths),
    ("BRW minima exp:1 k=2 m=16 x200",
     lambda be: sample_minima(StepSpec.exponential(1.0), 2, 16, 200, 1, backend=be)),
    ("BRW minima lattice k=2 m=20 x200",
     lambda be: sample_minima(StepSpec.lattice([0, 1], [0.5, 0.5]), 2, 20, 200, 1, backend=be)),
    ("exact enumeration n=6 k=2",
     lambda be: exact_depths(6, 2, backend=be)),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'case':38s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}")
    for name, fn in CASES:
        t_nb, out_nb = best_of(lambda: fn("numba"), args.repeat)
        t_np, out_np = best_of(lambda: fn("numpy"), args.repeat)
        if not _same(out_nb, out_np):
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:38s} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
