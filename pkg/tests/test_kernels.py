import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from braidkl import kernels
from braidkl.matroid import Matroid, braid, uniform

pytestmark = pytest.mark.skipif(not kernels.USE_NUMBA, reason="numba path disabled")


def _random_matroids():
    return st.sampled_from([uniform(2, 4), uniform(3, 6), braid(4), braid(5), Matroid(3, (0b011, 0b101))])


@given(_random_matroids())
@settings(max_examples=10, deadline=None)
def test_rank_and_flat_tables_agree(m):
    rank_nb = kernels.rank_table(m.n, m.bases)
    rank_np = kernels.rank_table_numpy(m.n, m.bases)
    assert np.array_equal(rank_nb, rank_np)
    assert np.array_equal(kernels.flat_table(m.n, rank_nb), kernels.flat_table_numpy(m.n, rank_np))
    assert kernels.signed_rank_sum(m.n, rank_nb) == kernels.signed_rank_sum_numpy(m.n, rank_np)


@given(st.permutations(range(7)), st.lists(st.integers(0, 127), min_size=1, max_size=20), st.integers(0, 127))
@settings(max_examples=30, deadline=None)
def test_mask_kernels_agree(perm, masks, keep):
    arr = np.asarray(masks, dtype=np.int64)
    p = np.asarray(perm, dtype=np.int64)
    assert np.array_equal(kernels.permute_masks(arr, p), kernels.permute_masks_numpy(arr, p))
    assert np.array_equal(kernels.compress_masks(arr, keep), kernels.compress_masks_numpy(arr, keep))


def test_rank_table_brute_force():
    m = braid(4)
    table = kernels.rank_table_numpy(m.n, m.bases)
    for s in range(1 << m.n):
        assert table[s] == max(bin(b & s).count("1") for b in m.bases)


def test_env_flag_selects_numpy_path():
    env = dict(os.environ, BRAIDKL_DISABLE_NUMBA="1")
    code = (
        "from braidkl import kernels\n"
        "from braidkl.klcalc import kl_generic\n"
        "from braidkl.matroid import braid\n"
        "assert not kernels.USE_NUMBA\n"
        "print(kl_generic(braid(5)).p.to_list())\n"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "[1, 5]"
