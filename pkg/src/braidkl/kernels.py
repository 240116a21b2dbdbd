"""Bitmask kernels over subsets of a small ground set.

Subsets of ``{0, ..., n-1}`` are integers whose bit ``i`` marks element ``i``.
Each kernel exists twice: a numba ``@njit`` loop and a vectorised numpy
version. The numba path is used when numba imports and the environment
variable ``BRAIDKL_DISABLE_NUMBA`` is unset (or ``0``); the numpy path is
always importable under the ``*_numpy`` names so the two can be compared.

Both paths return identical arrays; ``tests/test_kernels.py`` checks this
and ``benchmarks/bench_kernels.py`` times them against each other.
"""
from __future__ import annotations

import os

import numpy as np

__all__ = [
    "USE_NUMBA",
    "rank_table",
    "flat_table",
    "permute_masks",
    "compress_masks",
    "signed_rank_sum",
    "rank_table_numpy",
    "flat_table_numpy",
    "permute_masks_numpy",
    "compress_masks_numpy",
    "signed_rank_sum_numpy",
]

_DISABLED = os.environ.get("BRAIDKL_DISABLE_NUMBA", "").strip() not in ("", "0")

try:
    if _DISABLED:
        raise ImportError
    import numba
except ImportError:  # pragma: no cover - exercised by the env-flag test
    numba = None

USE_NUMBA = numba is not None

MASK_DTYPE = np.int64


def _as_masks(masks) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(masks, dtype=MASK_DTYPE))


# --------------------------------------------------------------------------
# numpy fallbacks
# --------------------------------------------------------------------------


def rank_table_numpy(n: int, bases) -> np.ndarray:
    """Rank of every subset, from the list of bases.

    Independent sets are the downward closure of the bases; the rank of a set
    is the largest independent subset, obtained by a max-transform over bits.
    """
    size = 1 << n
    indep = np.zeros(size, dtype=np.bool_)
    indep[_as_masks(bases)] = True
    for e in range(n):
        view = indep.reshape(-1, 2, 1 << e)
        view[:, 0, :] |= view[:, 1, :]
    card = np.bitwise_count(np.arange(size, dtype=MASK_DTYPE)).astype(np.int8)
    rank = np.where(indep, card, np.int8(0)).astype(np.int8)
    for e in range(n):
        view = rank.reshape(-1, 2, 1 << e)
        np.maximum(view[:, 1, :], view[:, 0, :], out=view[:, 1, :])
    return rank


def flat_table_numpy(n: int, rank: np.ndarray) -> np.ndarray:
    """Boolean table: ``S`` is a flat iff adding any outside element raises the rank."""
    flat = np.ones(1 << n, dtype=np.bool_)
    for e in range(n):
        view_r = rank.reshape(-1, 2, 1 << e)
        view_f = flat.reshape(-1, 2, 1 << e)
        view_f[:, 0, :] &= view_r[:, 1, :] > view_r[:, 0, :]
    return flat


def permute_masks_numpy(masks, perm) -> np.ndarray:
    """Apply the element map ``i -> perm[i]`` to every mask."""
    masks = _as_masks(masks)
    out = np.zeros_like(masks)
    for i, j in enumerate(perm):
        out |= ((masks >> i) & 1) << j
    return out


def compress_masks_numpy(masks, keep: int) -> np.ndarray:
    """Pack the bits selected by ``keep`` into the low positions, in order."""
    masks = _as_masks(masks)
    out = np.zeros_like(masks)
    j = 0
    i = 0
    while keep >> i:
        if (keep >> i) & 1:
            out |= ((masks >> i) & 1) << j
            j += 1
        i += 1
    return out


def signed_rank_sum_numpy(n: int, rank: np.ndarray) -> int:
    """``sum_S (-1)^|S| rank(S)`` over all subsets."""
    card = np.bitwise_count(np.arange(1 << n, dtype=MASK_DTYPE)).astype(np.int64)
    sign = 1 - 2 * (card & 1)
    return int(np.dot(sign, rank.astype(np.int64)))


# --------------------------------------------------------------------------
# numba kernels
# --------------------------------------------------------------------------

if USE_NUMBA:

    @numba.njit(cache=True)
    def _popcount(x):
        c = 0
        while x:
            x &= x - 1
            c += 1
        return c

    @numba.njit(cache=True)
    def _rank_table_nb(n, bases):
        size = 1 << n
        indep = np.zeros(size, dtype=np.bool_)
        for b in bases:
            indep[b] = True
        rank = np.zeros(size, dtype=np.int8)
        for s in range(size - 1, -1, -1):
            if indep[s]:
                rank[s] = _popcount(s)
                rest = s
                while rest:
                    low = rest & -rest
                    indep[s ^ low] = True
                    rest ^= low
        for s in range(size):
            if not indep[s]:
                best = 0
                rest = s
                while rest:
                    low = rest & -rest
                    r = rank[s ^ low]
                    if r > best:
                        best = r
                    rest ^= low
                rank[s] = best
        return rank

    @numba.njit(cache=True)
    def _flat_table_nb(n, rank):
        size = 1 << n
        flat = np.ones(size, dtype=np.bool_)
        for s in range(size):
            r = rank[s]
            for e in range(n):
                bit = 1 << e
                if not (s & bit) and rank[s | bit] == r:
                    flat[s] = False
                    break
        return flat

    @numba.njit(cache=True)
    def _permute_masks_nb(masks, perm):
        out = np.zeros_like(masks)
        for k in range(masks.shape[0]):
            m = masks[k]
            acc = 0
            i = 0
            while m:
                if m & 1:
                    acc |= 1 << perm[i]
                m >>= 1
                i += 1
            out[k] = acc
        return out

    @numba.njit(cache=True)
    def _compress_masks_nb(masks, keep):
        out = np.zeros_like(masks)
        for k in range(masks.shape[0]):
            m = masks[k]
            acc = 0
            j = 0
            kp = keep
            i = 0
            while kp:
                if kp & 1:
                    if (m >> i) & 1:
                        acc |= 1 << j
                    j += 1
                kp >>= 1
                i += 1
            out[k] = acc
        return out

    @numba.njit(cache=True)
    def _signed_rank_sum_nb(n, rank):
        total = 0
        for s in range(1 << n):
            if _popcount(s) & 1:
                total -= rank[s]
            else:
                total += rank[s]
        return total

    def rank_table(n: int, bases) -> np.ndarray:
        return _rank_table_nb(n, _as_masks(bases))

    def flat_table(n: int, rank: np.ndarray) -> np.ndarray:
        return _flat_table_nb(n, rank)

    def permute_masks(masks, perm) -> np.ndarray:
        return _permute_masks_nb(_as_masks(masks), np.asarray(perm, dtype=MASK_DTYPE))

    def compress_masks(masks, keep: int) -> np.ndarray:
        return _compress_masks_nb(_as_masks(masks), np.int64(keep))

    def signed_rank_sum(n: int, rank: np.ndarray) -> int:
        return int(_signed_rank_sum_nb(n, rank))

else:
    rank_table = rank_table_numpy
    flat_table = flat_table_numpy
    permute_masks = permute_masks_numpy
    compress_masks = compress_masks_numpy
    signed_rank_sum = signed_rank_sum_numpy
