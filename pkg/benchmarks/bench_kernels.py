"""Numba vs numpy kernel timings on the workloads the library actually produces.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both backends are called directly through ``numba_kernels`` / ``numpy_kernels``,
so the env flag does not matter here. Results are checked for equality first.
"""
import argparse
import time

import numpy as np

from kitlab import _kernels as K
from kitlab.fixtures import fixture
from kitlab.groupoid import group_cap
from kitlab.kits import product_groupoid


def workloads():
    C6 = fixture("C6")
    with group_cap(300):
        C66 = product_groupoid(C6, C6)
        C666 = product_groupoid(C66, C6)
        lat = C666.lattice(0)
    rng = np.random.default_rng(0)
    n = 200_000
    a, b = rng.integers(0, n, n // 2), rng.integers(0, n, n // 2)
    e = len(lat.elems)
    lloc = rng.integers(0, 64, (e, 64))
    rloc = rng.integers(0, 64, (64, e))
    return {
        "meet_is_single (C6^3 lattice)": ("meet_is_single", (lat.packed, lat.packed)),
        "closure (C6^3 generators)": ("closure", (lat.table, np.arange(0, e, 37), lat.ident)),
        "uf_labels (200k points)": ("uf_labels", (n, a, b)),
        "assoc_violation (C6^3 table)": ("assoc_violation", (C666.comp,)),
        "fixed_triples (216 x 64 x 216)": ("fixed_triples", (lloc, rloc)),
    }


def timed(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if K.numba_kernels is None:
        raise SystemExit("numba is not importable; nothing to compare")
    work = workloads()
    print(f"{'kernel':<34} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for label, (name, inputs) in work.items():
        inputs = tuple(np.ascontiguousarray(x, dtype=np.int64) if isinstance(x, np.ndarray) and x.dtype != np.uint64
                       else x for x in inputs)
        fnp, fnb = getattr(K.numpy_kernels, name), getattr(K.numba_kernels, name)
        ref, got = fnp(*inputs), fnb(*inputs)   # also compiles the numba version
        if not np.array_equal(np.asarray(ref), np.asarray(got)):
            raise SystemExit(f"{name}: backends disagree")
        tn, tb = timed(fnp, inputs, args.repeat), timed(fnb, inputs, args.repeat)
        print(f"{label:<34} {tn * 1e3:>8.2f}ms {tb * 1e3:>8.2f}ms {tn / tb:>7.1f}x")


if __name__ == "__main__":
    main()
