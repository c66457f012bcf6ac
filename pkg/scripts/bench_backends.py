"""Benchmark the numba kernels against the pure-numpy fallback.

Times the three batch kernels plus a full closure build of the 29120-element
group on each backend and checks that both produce identical arrays.

Usage: python3 scripts/bench_backends.py [--batch 200000] [--repeats 5]
"""

import argparse
import time

import numpy as np

from szchar._backend import HAS_NUMBA, get_backend, mul_table
from szchar.chevalley import J, torus
from szchar.groups import _closure, context, sz_unipotent


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workloads(backend, ctx, mats_a, mats_b):
    MUL = mul_table(ctx.F)
    m = ctx.m
    gens = [
        sz_unipotent(ctx, 1, 0),
        sz_unipotent(ctx, 0, 1),
        torus(ctx.F, ctx.gamma, ctx.F.pow(ctx.gamma, 2 * ctx.theta - 1)),
        J,
    ]
    keys = backend.pack_mats(mats_a, m)
    return {
        "batch_mat_mul": lambda: backend.batch_mat_mul(MUL, mats_a, mats_b),
        "pack_mats": lambda: backend.pack_mats(mats_a, m),
        "unpack_mats": lambda: backend.unpack_mats(keys, m),
        "closure_29120": lambda: _closure(backend, MUL, m, gens),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--batch", type=int, default=200_000)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    ctx = context(1)
    rng = np.random.default_rng(args.seed)
    mats_a = rng.integers(0, ctx.q, size=(args.batch, 4, 4), dtype=np.uint8)
    mats_b = rng.integers(0, ctx.q, size=(args.batch, 4, 4), dtype=np.uint8)

    numpy_backend = get_backend("numpy")
    numpy_work = workloads(numpy_backend, ctx, mats_a, mats_b)
    if HAS_NUMBA:
        numba_backend = get_backend("numba")
        numba_work = workloads(numba_backend, ctx, mats_a, mats_b)
        for name in ("batch_mat_mul", "pack_mats", "unpack_mats"):
            got = numba_work[name]()
            want = numpy_work[name]()
            if not np.array_equal(got, want):
                raise SystemExit(f"backend disagreement in {name}")
            numba_work[name]()  # warm once more after the jit compile
    else:
        numba_work = None
        print("warning: numba not importable - timing the numpy fallback only")

    print(f"batch = {args.batch}, repeats = {args.repeats}, field = GF(2^{ctx.m})")
    header = f"{'kernel':<16} {'numpy (s)':>10}"
    if numba_work:
        header += f" {'numba (s)':>10} {'speedup':>8}"
    print(header)
    for name, fn in numpy_work.items():
        t_numpy = best_of(fn, args.repeats)
        line = f"{name:<16} {t_numpy:>10.4f}"
        if numba_work:
            t_numba = best_of(numba_work[name], args.repeats)
            line += f" {t_numba:>10.4f} {t_numpy / t_numba:>7.1f}x"
        print(line)


if __name__ == "__main__":
    main()
