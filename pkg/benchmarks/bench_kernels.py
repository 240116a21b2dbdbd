"""Time the numba kernels against their numpy counterparts.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each row reports the best of ``--repeat`` runs per path after one warm-up
call (which also triggers numba compilation) and checks that both paths
return the same result.
"""
import argparse
import timeit

import numpy as np

from braidkl import kernels
from braidkl.matroid import braid, uniform


def cases():
    k6 = braid(6)
    u = uniform(7, 14)
    rng = np.random.default_rng(0)
    masks = rng.integers(0, 1 << 15, size=200_000, dtype=np.int64)
    perm = rng.permutation(15).astype(np.int64)
    for label, m in (("K6 (n=15)", k6), ("U(7,14)", u)):
        rank = kernels.rank_table_numpy(m.n, m.bases)
        yield f"rank_table {label}", (kernels.rank_table, kernels.rank_table_numpy), (m.n, m.bases)
        yield f"flat_table {label}", (kernels.flat_table, kernels.flat_table_numpy), (m.n, rank)
        yield f"signed_rank_sum {label}", (kernels.signed_rank_sum, kernels.signed_rank_sum_numpy), (m.n, rank)
    yield "permute_masks 200k", (kernels.permute_masks, kernels.permute_masks_numpy), (masks, perm)
    yield "compress_masks 200k", (kernels.compress_masks, kernels.compress_masks_numpy), (masks, 0b101101101101101)


def best(fn, args, repeat):
    fn(*args)
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not kernels.USE_NUMBA:
        print("numba path disabled (BRAIDKL_DISABLE_NUMBA set or numba missing); nothing to compare")
        return
    print(f"{'kernel':<30}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for name, (fast, slow), call_args in cases():
        a, b = fast(*call_args), slow(*call_args)
        assert np.array_equal(np.asarray(a), np.asarray(b)), name
        t_fast = best(fast, call_args, args.repeat)
        t_slow = best(slow, call_args, args.repeat)
        print(f"{name:<30}{t_fast * 1e3:>12.2f}{t_slow * 1e3:>12.2f}{t_slow / t_fast:>9.1f}x")


if __name__ == "__main__":
    main()
