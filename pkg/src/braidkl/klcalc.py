"""Kazhdan-Lusztig and Z-polynomials of matroids.

Two engines:

* :func:`kl_generic` runs the defining recursion over the lattice of flats of
  an explicit matroid (bases form), memoised on the simplified contraction.
  :func:`kl_generic_braid` runs the same recursion for braid matroids on the
  partition lattice, which is what the flats of ``K_n`` are; this reaches
  sizes where the bases list is out of reach.
* :func:`braid_kl` uses that the flats of ``K_n`` with ``k`` blocks number
  ``S(n, k)`` and each contracts (after simplification) to ``K_k``.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .exactmath import IntPolynomial, poly_is_palindromic, set_partitions, stirling2
from .matroid import Matroid, braid, flats_lattice, loops, simplify, simplified_contraction

__all__ = [
    "KLResult",
    "KLValidationError",
    "palindromic_complete",
    "kl_generic",
    "kl_generic_braid",
    "braid_kl",
    "verify_theorem_main",
    "check_kl_axioms",
]


class KLValidationError(ArithmeticError):
    """A completed polynomial broke the degree bound or went negative."""


@dataclass(frozen=True)
class KLResult:
    p: IntPolynomial
    z: IntPolynomial
    rank: int

    def as_dict(self) -> dict:
        return {"rank": self.rank, "p": self.p.to_list(), "z": self.z.to_list()}


def palindromic_complete(q: IntPolynomial, d: int) -> IntPolynomial:
    """The unique ``P`` of degree ``< d/2`` making ``P + q`` palindromic of degree ``d``.

    ``q`` is the flat sum without the bottom flat. Coefficients are
    ``p_i = q_(d-i) - q_i``; rank zero gives ``1``.
    """
    if d == 0:
        if q:
            raise KLValidationError(f"rank-0 tail must vanish, got {q}")
        return IntPolynomial([1])
    if q.degree > d:
        raise KLValidationError(f"tail {q} has degree above {d}")
    p = IntPolynomial([q[d - i] - q[i] for i in range((d + 1) // 2)])
    if any(c < 0 for c in p):
        raise KLValidationError(f"negative coefficient in completed polynomial {p}")
    if 2 * p.degree >= d:
        raise KLValidationError(f"degree {p.degree} of {p} not below {d}/2")
    return p


def _result(tail: IntPolynomial, d: int) -> KLResult:
    p = palindromic_complete(tail, d)
    return KLResult(p, p + tail, d)


_generic_memo: dict[tuple, KLResult] = {}
_memo_lock = threading.Lock()


def kl_generic(m: Matroid) -> KLResult:
    """``P`` and ``Z`` of a loopless matroid from the flat recursion.

    Flats do not change under simplification, so the recursion runs on the
    simple matroid and memoises on its bases key.
    """
    if loops(m):
        raise ValueError("kl_generic needs a loopless matroid")
    simple, _ = simplify(m)
    return _kl_simple(simple)


def _kl_simple(m: Matroid) -> KLResult:
    key = m.key
    hit = _generic_memo.get(key)
    if hit is not None:
        return hit
    lattice = flats_lattice(m)
    tail = IntPolynomial()
    for r in range(1, lattice.rank + 1):
        for flat in lattice.by_rank[r]:
            sub, _ = simplified_contraction(m, flat)
            tail = tail + _kl_simple(sub).p.shift(r)
    res = _result(tail, m.rank)
    with _memo_lock:
        _generic_memo.setdefault(key, res)
    return res


@lru_cache(maxsize=None)
def _kl_partition(blocks: frozenset) -> KLResult:
    # the interval above this partition is the partition lattice of its blocks
    k = len(blocks)
    items = sorted(blocks, key=min)
    tail = IntPolynomial()
    for coarse in set_partitions(items):
        if len(coarse) == k:
            continue
        merged = frozenset(frozenset().union(*grp) for grp in coarse)
        tail = tail + _kl_partition(merged).p.shift(k - len(coarse))
    return _result(tail, k - 1)


def kl_generic_braid(n: int, mode: str = "auto") -> KLResult:
    """Generic recursion for ``K_n``.

    ``mode="bases"`` uses the explicit cycle matroid (``n <= 6``);
    ``mode="partition"`` walks set partitions of ``[n]`` as flats;
    ``"auto"`` picks bases up to 6 and partitions above.
    """
    if n < 1:
        raise ValueError("braid matroids start at n = 1")
    if mode == "auto":
        mode = "bases" if n <= 6 else "partition"
    if mode == "bases":
        return kl_generic(braid(n))
    if mode == "partition":
        return _kl_partition(frozenset(frozenset([i]) for i in range(n)))
    raise ValueError(f"unknown mode {mode!r}")


@lru_cache(maxsize=None)
def braid_kl(n: int) -> KLResult:
    """``P`` and ``Z`` of ``K_n`` from ``Z = sum_k S(n,k) t^(n-k) P_{K_k}``."""
    if n < 1:
        raise ValueError("braid matroids start at n = 1")
    tail = IntPolynomial()
    for k in range(1, n):
        tail = tail + (braid_kl(k).p * stirling2(n, k)).shift(n - k)
    return _result(tail, n - 1)


def check_kl_axioms(res: KLResult) -> list[str]:
    """List the axioms ``res`` violates (empty when all hold)."""
    problems = []
    d = res.rank
    if d == 0 and res.p != IntPolynomial([1]):
        problems.append("rank 0 but P != 1")
    if d > 0 and 2 * res.p.degree >= d:
        problems.append(f"deg P = {res.p.degree} not below rank/2 = {d}/2")
    if res.z.degree != d or not poly_is_palindromic(res.z, d):
        problems.append(f"Z = {res.z} not palindromic of degree {d}")
    if any(c < 0 for c in res.p) or any(c < 0 for c in res.z):
        problems.append("negative coefficient")
    return problems


def verify_theorem_main(n: int, counts_simple: Sequence[int], counts_all: Sequence[int]) -> dict:
    """Compare ``P_{K_n}``, ``Z_{K_n}`` with rank counts on ground size ``n - 1``.

    ``counts_simple[k]`` and ``counts_all[k]`` are the numbers of simple and of
    all quasi series-parallel matroids on ``[n-1]`` of rank ``k``. The
    ``t^i`` coefficient is matched against rank ``n - 1 - i``.
    """
    res = braid_kl(n)
    m = n - 1

    def at(counts, k):
        return counts[k] if 0 <= k < len(counts) else 0

    p_rows = [
        {"i": i, "coefficient": res.p[i], "count": at(counts_simple, m - i)}
        for i in range(max(res.p.degree, 0) + 1)
    ]
    # coefficients of P vanish beyond its degree; the counts must vanish too
    tail_rows = [
        {"i": i, "coefficient": 0, "count": at(counts_simple, m - i)}
        for i in range(res.p.degree + 1, m + 1)
        if at(counts_simple, m - i) != 0
    ]
    z_rows = [{"i": i, "coefficient": res.z[i], "count": at(counts_all, m - i)} for i in range(m + 1)]
    rows = p_rows + tail_rows
    ok = all(r["coefficient"] == r["count"] for r in rows + z_rows)
    return {
        "n": n,
        "p": res.p.to_list(),
        "z": res.z.to_list(),
        "p_checks": rows,
        "z_checks": z_rows,
        "ok": ok,
    }
