"""Labelled enumeration of (quasi, simple) series-parallel matroids and cacti.

Series-parallel matroids on ``[n]`` are generated level by level: every one
with ``n >= 2`` elements arises from one on ``n - 1`` elements by a series or
parallel extension whose new element may carry any of the ``n`` labels.
Quasi series-parallel matroids are direct sums of series-parallel matroids
over set partitions of the ground set, so they need no deduplication.
"""
from __future__ import annotations

import csv
import io
import logging
import os
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable, Iterator, Sequence

from .exactmath import binomial, double_factorial, set_partitions, stirling2
from .matroid import (
    Matroid,
    Multigraph,
    circuits,
    coloops,
    from_graph,
    is_series_parallel,
    is_simple,
    loops,
)

__all__ = [
    "MAX_SP",
    "MAX_QSP",
    "MAX_QSP_EXTENDED",
    "CountTable",
    "TriangularCactus",
    "default_jobs",
    "sp_level",
    "enum_series_parallel",
    "iter_qsp",
    "enum_qsp",
    "iter_simple_qsp",
    "enum_simple_qsp",
    "count_table",
    "tables_to_csv",
    "enum_triangular_cacti",
    "cactus_to_matroid",
    "matroid_to_cactus",
    "cacti_count_formula",
    "e_k_by_enumeration",
    "LISTED_E_SEQUENCE",
    "e_sequence_readings",
    "odd_case_count",
    "relation_checks",
]

log = logging.getLogger(__name__)

MAX_SP = 8
MAX_QSP = 7
MAX_QSP_EXTENDED = 8
MAX_CACTUS = 9

JOBS_ENV = "BRAIDKL_JOBS"


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


# --------------------------------------------------------------------------
# series-parallel matroids
# --------------------------------------------------------------------------


def _insert_label(bases: Iterable[int], top: int, f: int) -> tuple[int, ...]:
    """Move element ``top`` (the newest) to label ``f``, shifting ``f..top-1`` up."""
    low = (1 << f) - 1
    topbit = 1 << top
    out = []
    for b in bases:
        moved = (b & low) | ((b & ~low & ~topbit) << 1)
        if b & topbit:
            moved |= 1 << f
        out.append(moved)
    out.sort()
    return tuple(out)


def _extensions(bases: tuple[int, ...], n_prev: int) -> Iterator[tuple[int, ...]]:
    """Every series/parallel extension of one matroid, new element at every label."""
    m = Matroid(n_prev, bases)
    lp, cl = loops(m), coloops(m)
    new = 1 << n_prev
    for e in range(n_prev):
        bit = 1 << e
        grown = []
        if not cl & bit:
            grown.append([b | new for b in bases] + [b | bit for b in bases if not b & bit])
        if not lp & bit:
            grown.append(list(bases) + [(b & ~bit) | new for b in bases if b & bit])
        for ext in grown:
            for f in range(n_prev + 1):
                yield _insert_label(ext, n_prev, f)


def _extend_chunk(args) -> set[tuple[int, ...]]:
    n_prev, chunk = args
    found: set[tuple[int, ...]] = set()
    for bases in chunk:
        found.update(_extensions(bases, n_prev))
    return found


def sp_level(
    prev: Sequence[tuple[int, ...]],
    n: int,
    jobs: int = 1,
    rng: random.Random | None = None,
) -> tuple[tuple[int, ...], ...]:
    """Series-parallel bases tuples on ``[n]`` from those on ``[n-1]``.

    ``rng`` shuffles the frontier before extension; the deduplicated result
    is sorted and does not depend on it (nor on ``jobs``).
    """
    frontier = list(prev)
    if rng is not None:
        rng.shuffle(frontier)
    if jobs > 1 and len(frontier) > 1:
        step = -(-len(frontier) // jobs)
        chunks = [(n - 1, frontier[i:i + step]) for i in range(0, len(frontier), step)]
        found: set[tuple[int, ...]] = set()
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_extend_chunk, chunks):
                found |= part
    else:
        found = _extend_chunk((n - 1, frontier))
    return tuple(sorted(found, key=lambda bs: (bin(bs[0]).count("1"), bs)))


@lru_cache(maxsize=None)
def _sp_keys(n: int) -> tuple[tuple[int, ...], ...]:
    if n == 1:
        return ((0,), (1,))
    prev = _sp_keys(n - 1)
    log.info("series-parallel level %d from %d matroids", n, len(prev))
    return sp_level(prev, n, jobs=default_jobs())


def enum_series_parallel(n: int) -> dict[int, list[Matroid]]:
    """All labelled series-parallel matroids on ``[n]``, grouped by rank."""
    if not 1 <= n <= MAX_SP:
        raise ValueError(f"series-parallel enumeration supports 1 <= n <= {MAX_SP}")
    out: dict[int, list[Matroid]] = {r: [] for r in range(n + 1)}
    for bases in _sp_keys(n):
        m = Matroid(n, bases)
        out[m.rank].append(m)
    return out


@lru_cache(maxsize=None)
def _sp_in_block(block: int, simple_only: bool) -> tuple[tuple[int, ...], ...]:
    """Series-parallel bases tuples on ``[s]`` deposited onto the bits of ``block``."""
    elems = [i for i in range(block.bit_length()) if block >> i & 1]
    s = len(elems)
    out = []
    for bases in _sp_keys(s):
        if simple_only:
            m = Matroid(s, bases)
            if not is_simple(m):
                continue
        placed = []
        for b in bases:
            acc = 0
            for i, e in enumerate(elems):
                if b >> i & 1:
                    acc |= 1 << e
            placed.append(acc)
        out.append(tuple(placed))
    return tuple(out)


def _iter_sums(n: int, simple_only: bool) -> Iterator[Matroid]:
    for blocks in set_partitions(range(n)):
        masks = [sum(1 << e for e in blk) for blk in blocks]
        options = [_sp_in_block(mask, simple_only) for mask in masks]
        if any(not opt for opt in options):
            continue
        for choice in product(*options):
            bases = [0]
            for part in choice:
                bases = [a | b for a in bases for b in part]
            yield Matroid(n, tuple(bases))


def _check_qsp_size(n: int, extended: bool) -> None:
    limit = MAX_QSP_EXTENDED if extended else MAX_QSP
    if not 0 <= n <= limit:
        hint = "" if extended else " (n = 8 needs extended mode)"
        raise ValueError(f"quasi series-parallel enumeration supports n <= {limit}{hint}")


def iter_qsp(n: int, extended: bool = False) -> Iterator[Matroid]:
    """Labelled quasi series-parallel matroids on ``[n]``, one direct sum per set partition."""
    _check_qsp_size(n, extended)
    return _iter_sums(n, simple_only=False)


def enum_qsp(n: int, extended: bool = False) -> dict[int, list[Matroid]]:
    return _group(iter_qsp(n, extended), n)


def iter_simple_qsp(n: int, extended: bool = False) -> Iterator[Matroid]:
    """Simple members of :func:`iter_qsp`.

    A quasi series-parallel matroid is simple iff each component is, so the
    sums are built from simple components only instead of filtering.
    """
    _check_qsp_size(n, extended)
    return _iter_sums(n, simple_only=True)


def enum_simple_qsp(n: int, extended: bool = False) -> dict[int, list[Matroid]]:
    return _group(iter_simple_qsp(n, extended), n)


def _group(items: Iterable[Matroid], n: int) -> dict[int, list[Matroid]]:
    out: dict[int, list[Matroid]] = {r: [] for r in range(n + 1)}
    for m in items:
        out[m.rank].append(m)
    return out


# --------------------------------------------------------------------------
# count tables
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CountTable:
    """Counts by rank ``0..n`` of one family on ground size ``n``."""

    n: int
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.counts) != self.n + 1:
            raise ValueError(f"need {self.n + 1} counts, got {len(self.counts)}")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be nonnegative")

    def __getitem__(self, k: int) -> int:
        return self.counts[k] if 0 <= k <= self.n else 0

    @property
    def total(self) -> int:
        return sum(self.counts)

    def is_symmetric(self) -> bool:
        return self.counts == self.counts[::-1]


FAMILIES = ("sp", "qsp", "simple-qsp")


def count_table(family: str, n: int, extended: bool = False) -> CountTable:
    """Count the enumerated family on ``[n]`` by rank."""
    if family == "sp":
        if not 1 <= n <= MAX_SP or (n == MAX_SP and not extended):
            raise ValueError(f"series-parallel counts need 1 <= n <= {MAX_SP - 1} ({MAX_SP} extended)")
        tally = Counter(bin(bs[0]).count("1") for bs in _sp_keys(n))
    elif family == "qsp":
        tally = Counter(m.rank for m in iter_qsp(n, extended))
    elif family == "simple-qsp":
        tally = Counter(m.rank for m in iter_simple_qsp(n, extended))
    else:
        raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")
    return CountTable(n, tuple(tally.get(k, 0) for k in range(n + 1)))


def tables_to_csv(tables: Sequence[CountTable]) -> str:
    """Rows are ranks, columns are ground sizes; cells with ``k > n`` stay blank."""
    top = max(t.n for t in tables)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k\\n"] + [t.n for t in tables])
    for k in range(top + 1):
        writer.writerow([k] + [t[k] if k <= t.n else "" for t in tables])
    return buf.getvalue()


# --------------------------------------------------------------------------
# triangular cacti
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TriangularCactus:
    """Labelled triangular cactus on vertices ``0..m-1``, stored by its triangles."""

    m: int
    triangles: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        tris = tuple(sorted(tuple(sorted(t)) for t in self.triangles))
        object.__setattr__(self, "triangles", tris)
        problem = self._problem()
        if problem:
            raise ValueError(f"not a triangular cactus: {problem}")

    def _problem(self) -> str | None:
        if self.m < 1 or self.m % 2 == 0:
            return f"vertex count {self.m} must be odd and positive"
        if len(self.triangles) != (self.m - 1) // 2:
            return f"{len(self.triangles)} triangles on {self.m} vertices"
        edges = [e for t in self.triangles for e in combinations(t, 2)]
        if len(set(edges)) != len(edges):
            return "two triangles share an edge"
        if any(not 0 <= v < self.m for t in self.triangles for v in t):
            return "vertex out of range"
        # m = 2t + 1 vertices with t edge-disjoint triangles: connected forces tree-like
        parent = list(range(self.m))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in edges:
            parent[find(a)] = find(b)
        if len({find(v) for v in range(self.m)}) != 1:
            return "disconnected"
        return None

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(e for t in self.triangles for e in combinations(t, 2)))


@lru_cache(maxsize=None)
def _cacti(m: int) -> tuple[tuple[tuple[int, int, int], ...], ...]:
    if m == 1:
        return ((),)
    found = set()
    smaller = _cacti(m - 2)
    for u, w in combinations(range(m), 2):
        rest = [v for v in range(m) if v != u and v != w]
        for tris in smaller:
            mapped = [tuple(rest[v] for v in t) for t in tris]
            for v in rest:
                new = mapped + [(v, u, w)]
                found.add(tuple(sorted(tuple(sorted(t)) for t in new)))
    return tuple(sorted(found))


def enum_triangular_cacti(m: int) -> list[TriangularCactus]:
    """All labelled triangular cacti on ``m`` vertices (``m`` odd, ``m <= 9``).

    Built by attaching a triangle through one vertex to a cactus on two fewer
    vertices, which undoes the removal of two degree-2 vertices of a leaf
    triangle.
    """
    if m % 2 == 0 or not 1 <= m <= MAX_CACTUS:
        raise ValueError(f"cacti need an odd vertex count between 1 and {MAX_CACTUS}")
    return [TriangularCactus(m, tris) for tris in _cacti(m)]


def cactus_to_matroid(g: TriangularCactus) -> Matroid:
    """Cycle matroid of a graph with one edge per cactus vertex and a triangle per cactus triangle."""
    if not g.triangles:
        return Matroid(1, (1,))
    placed: dict[int, tuple[int, int]] = {}
    a, b, c = g.triangles[0]
    placed[a], placed[b], placed[c] = (0, 1), (1, 2), (2, 0)
    nv = 3
    pending = list(g.triangles[1:])
    while pending:
        for idx, tri in enumerate(pending):
            old = [v for v in tri if v in placed]
            if len(old) == 1:
                break
        else:
            raise ValueError("cactus triangles do not attach one at a time")
        tri = pending.pop(idx)
        v = old[0]
        u, w = (x for x in tri if x != v)
        x, y = placed[v]
        placed[u], placed[w] = (x, nv), (nv, y)
        nv += 1
    graph = Multigraph(nv, tuple((p, q, lab) for lab, (p, q) in placed.items()))
    return from_graph(graph)


def matroid_to_cactus(m: Matroid) -> TriangularCactus:
    """Graph joining ``a, b`` whenever ``{a, b}`` lies in a 3-element circuit."""
    k = m.rank
    if m.n != 2 * k - 1 or not is_simple(m) or not is_series_parallel(m):
        raise ValueError("need a simple series-parallel matroid of rank k on 2k-1 elements")
    adj = {v: set() for v in range(m.n)}
    for c in circuits(m, 3):
        a, b, d = (i for i in range(m.n) if c >> i & 1)
        for p, q in ((a, b), (a, d), (b, d)):
            adj[p].add(q)
            adj[q].add(p)
    tris = [
        (a, b, d)
        for a, b, d in combinations(range(m.n), 3)
        if b in adj[a] and d in adj[a] and d in adj[b]
    ]
    return TriangularCactus(m.n, tuple(tris))


def cacti_count_formula(k: int) -> int:
    """``(2k-3)!! (2k-1)^(k-2)``, the number of triangular cacti on ``2k-1`` vertices."""
    if k < 2:
        raise ValueError("the cactus count formula needs k >= 2")
    return double_factorial(2 * k - 3) * (2 * k - 1) ** (k - 2)


# --------------------------------------------------------------------------
# smallest-rank simple matroids on even ground sets
# --------------------------------------------------------------------------

LISTED_E_SEQUENCE = (0, 1, 75, 9345, 1865745, 554479695, 231052877055, 128938132548225)


def e_k_by_enumeration(k: int) -> int:
    """Simple series-parallel matroids of rank ``k + 1`` on ``[2k]``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return 0
    n = 2 * k
    if n > MAX_SP:
        raise ValueError(f"E_{k} needs series-parallel enumeration at n = {n} > {MAX_SP}")
    return sum(1 for bases in _sp_keys(n) if bin(bases[0]).count("1") == k + 1 and is_simple(Matroid(n, bases)))


def e_sequence_readings(k_max: int = 3) -> list[dict]:
    """Compare enumerated ``E_k`` with the listed sequence under two index conventions.

    ``literal`` takes entry ``k`` of :data:`LISTED_E_SEQUENCE` as ``E_k``;
    ``shifted`` takes entry ``k - 1``. For each reading the odd-case formula
    is evaluated and compared with the enumerated count on ``[2k]``.
    """
    rows = []
    for k in range(1, k_max + 1):
        enumerated = e_k_by_enumeration(k)
        target = sum(1 for m in iter_simple_qsp(2 * k, extended=2 * k > MAX_QSP) if m.rank == k + 1)
        literal = LISTED_E_SEQUENCE[k] if k < len(LISTED_E_SEQUENCE) else None
        shifted = LISTED_E_SEQUENCE[k - 1]
        rows.append(
            {
                "k": k,
                "enumerated": enumerated,
                "literal": literal,
                "shifted": shifted,
                "count": target,
                "formula_enumerated": odd_case_count(k, enumerated),
                "formula_literal": None if literal is None else odd_case_count(k, literal),
                "formula_shifted": odd_case_count(k, shifted),
            }
        )
    return rows


def _power(base: int, exp: int) -> int:
    if exp >= 0:
        return base ** exp
    if base in (1, -1):
        return base ** (-exp)
    raise ValueError(f"{base}^{exp} is not an integer")


def odd_case_count(k: int, e_k: int) -> int:
    """Simple quasi series-parallel matroids of rank ``k + 1`` on ``[2k]``.

    ``E_k`` counts the connected ones; the rest split into two components of
    sizes ``2a + 1`` and ``2k - 2a - 1``, each counted by the cactus formula.
    """
    if k < 1:
        raise ValueError("odd_case_count needs k >= 1")
    total = 0
    for a in range(k):
        total += (
            binomial(2 * k, 2 * a + 1)
            * double_factorial(2 * a - 1)
            * double_factorial(2 * k - 2 * a - 3)
            * _power(2 * a + 1, a - 1)
            * _power(2 * k - 2 * a - 1, k - a - 2)
        )
    if total % 2:
        raise ArithmeticError("unordered component pairs must come in twos")
    return e_k + total // 2


# --------------------------------------------------------------------------
# loop-addition and parallel-fattening relations
# --------------------------------------------------------------------------


def relation_checks(n: int) -> dict:
    """Check the binomial and Stirling relations on enumerated families up to ``[n]``.

    ``|A(m,k)| = sum_i C(m,i) |A_loopless(i,k)|`` and
    ``|A_loopless(m,k)| = sum_i S(m,i) |S(i,k)|`` for every ``m <= n``.
    """
    if not 0 <= n <= MAX_QSP:
        raise ValueError(f"relation checks support n <= {MAX_QSP}")
    a_all: dict[int, Counter] = {}
    a_loopless: dict[int, Counter] = {}
    a_simple: dict[int, Counter] = {}
    for m in range(n + 1):
        everything = list(iter_qsp(m))
        a_all[m] = Counter(x.rank for x in everything)
        a_loopless[m] = Counter(x.rank for x in everything if not loops(x))
        a_simple[m] = Counter(x.rank for x in everything if is_simple(x))
    rows = []
    for m in range(n + 1):
        for k in range(m + 1):
            binom_side = sum(binomial(m, i) * a_loopless[i][k] for i in range(k, m + 1))
            stirling_side = sum(stirling2(m, i) * a_simple[i][k] for i in range(k, m + 1))
            rows.append(
                {
                    "n": m,
                    "k": k,
                    "all": a_all[m][k],
                    "binomial_sum": binom_side,
                    "loopless": a_loopless[m][k],
                    "stirling_sum": stirling_side,
                    "ok": a_all[m][k] == binom_side and a_loopless[m][k] == stirling_side,
                }
            )
    return {"n": n, "rows": rows, "ok": all(r["ok"] for r in rows)}
