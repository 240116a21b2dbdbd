"""Matroids on small labelled ground sets, stored by their bases.

A :class:`Matroid` on ``{0, ..., n-1}`` (``n <= 16``) keeps its bases as a
sorted tuple of bit masks, so equality of labelled matroids is a tuple
comparison. The rank of every subset is tabulated lazily by
:func:`braidkl.kernels.rank_table`; most predicates read that table.

Minors are relabelled onto ``{0, ..., k-1}`` preserving the order of the
surviving elements.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import kernels

__all__ = [
    "MAX_GROUND",
    "MAX_ISOMORPHISM",
    "Matroid",
    "Multigraph",
    "FlatLattice",
    "uniform",
    "loop",
    "coloop",
    "from_graph",
    "complete_graph",
    "braid",
    "rank_of",
    "closure",
    "flats_lattice",
    "dual",
    "delete",
    "contract",
    "minor",
    "restrict",
    "relabel",
    "direct_sum",
    "loops",
    "coloops",
    "connected_components",
    "is_connected",
    "beta_invariant",
    "has_minor",
    "is_series_parallel",
    "is_series_parallel_by_minors",
    "is_quasi_series_parallel",
    "is_quasi_series_parallel_by_minors",
    "series_extension",
    "parallel_extension",
    "parallel_classes",
    "simplify",
    "simplified_contraction",
    "is_simple",
    "circuits",
    "are_isomorphic",
    "isomorphism_classes",
    "check_basis_exchange",
    "parse_multigraph",
]

MAX_GROUND = 16
MAX_ISOMORPHISM = 10


def _bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True)
class Matroid:
    """A matroid on ``{0, ..., n-1}`` given by its bases (bit masks)."""

    n: int
    bases: tuple[int, ...]

    def __post_init__(self):
        if not 0 <= self.n <= MAX_GROUND:
            raise ValueError(f"ground set size {self.n} outside 0..{MAX_GROUND}")
        bases = tuple(sorted(set(int(b) for b in self.bases)))
        if not bases:
            raise ValueError("a matroid needs at least one basis")
        full = (1 << self.n) - 1
        r = _popcount(bases[0])
        for b in bases:
            if b & ~full:
                raise ValueError(f"basis {b:#b} not inside a ground set of size {self.n}")
            if _popcount(b) != r:
                raise ValueError("bases of different cardinalities")
        object.__setattr__(self, "bases", bases)

    @property
    def rank(self) -> int:
        return _popcount(self.bases[0])

    @property
    def ground(self) -> int:
        return (1 << self.n) - 1

    @property
    def key(self) -> tuple:
        return (self.n, self.bases)

    @cached_property
    def rank_table(self) -> np.ndarray:
        return kernels.rank_table(self.n, self.bases)

    @cached_property
    def basis_set(self) -> frozenset[int]:
        return frozenset(self.bases)

    @cached_property
    def bases_array(self) -> np.ndarray:
        return np.asarray(self.bases, dtype=np.int64)

    def __repr__(self) -> str:
        shown = [sorted(_bits(b)) for b in self.bases[:6]]
        more = "" if len(self.bases) <= 6 else f", ... ({len(self.bases)} bases)"
        return f"Matroid(n={self.n}, rank={self.rank}, bases={shown}{more})"


@dataclass(frozen=True)
class Multigraph:
    """Multigraph whose edge labels ``0..m-1`` become matroid elements.

    Loops (``u == v``) and parallel edges are allowed.
    """

    num_vertices: int
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        edges = tuple(sorted((int(u), int(v), int(lab)) for u, v, lab in self.edges))
        labels = sorted(lab for _, _, lab in edges)
        if labels != list(range(len(edges))):
            raise ValueError("edge labels must be distinct and form 0..m-1")
        for u, v, _ in edges:
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise ValueError(f"edge ({u}, {v}) uses a vertex outside 0..{self.num_vertices - 1}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[int, int]], num_vertices: int | None = None) -> "Multigraph":
        """Label edges by their position in ``pairs``."""
        if num_vertices is None:
            num_vertices = 1 + max((max(u, v) for u, v in pairs), default=-1)
        return cls(num_vertices, tuple((u, v, i) for i, (u, v) in enumerate(pairs)))

    def to_text(self) -> str:
        return "".join(f"{u} {v} {lab}\n" for u, v, lab in sorted(self.edges, key=lambda e: e[2]))


def parse_multigraph(text: str) -> Multigraph:
    """Parse lines ``u v label`` (0-indexed vertices); ``#`` starts a comment."""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = re.split(r"[\s,]+", line)
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'u v label', got {raw!r}")
        try:
            u, v, lab = (int(p) for p in parts)
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer field in {raw!r}") from None
        if min(u, v, lab) < 0:
            raise ValueError(f"line {lineno}: negative field in {raw!r}")
        edges.append((u, v, lab))
    nv = 1 + max((max(u, v) for u, v, _ in edges), default=-1)
    return Multigraph(nv, tuple(edges))


@dataclass(frozen=True)
class FlatLattice:
    """Flats of a matroid grouped by rank."""

    n: int
    by_rank: tuple[tuple[int, ...], ...]
    rank_of_flat: dict = field(compare=False, repr=False, hash=False)

    @property
    def rank(self) -> int:
        return len(self.by_rank) - 1

    @property
    def flats(self) -> list[int]:
        return [f for level in self.by_rank for f in level]

    def counts(self) -> tuple[int, ...]:
        return tuple(len(level) for level in self.by_rank)

    def __len__(self) -> int:
        return sum(len(level) for level in self.by_rank)


# --------------------------------------------------------------------------
# constructions
# --------------------------------------------------------------------------


def uniform(r: int, n: int) -> Matroid:
    if not 0 <= r <= n:
        raise ValueError(f"U_{{{r},{n}}} needs 0 <= r <= n")
    return Matroid(n, tuple(sum(1 << i for i in c) for c in combinations(range(n), r)))


def loop() -> Matroid:
    return uniform(0, 1)


def coloop() -> Matroid:
    return uniform(1, 1)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def from_graph(g: Multigraph) -> Matroid:
    """Cycle matroid: bases are the maximal spanning forests."""
    m = len(g.edges)
    if m > MAX_GROUND:
        raise ValueError(f"{m} edges exceed the {MAX_GROUND}-element limit")
    by_label = {lab: (u, v) for u, v, lab in g.edges}
    uf = _UnionFind(g.num_vertices)
    for u, v, _ in g.edges:
        uf.union(u, v)
    r = g.num_vertices - len({uf.find(x) for x in range(g.num_vertices)})
    candidates = [lab for lab in range(m) if by_label[lab][0] != by_label[lab][1]]
    bases = []
    for combo in combinations(candidates, r):
        uf = _UnionFind(g.num_vertices)
        if all(uf.union(*by_label[lab]) for lab in combo):
            bases.append(sum(1 << lab for lab in combo))
    return Matroid(m, tuple(bases))


def complete_graph(n: int) -> Multigraph:
    """``K_n`` with edges labelled in lexicographic order of vertex pairs."""
    return Multigraph.from_pairs(list(combinations(range(n), 2)), num_vertices=n)


def braid(n: int) -> Matroid:
    """Cycle matroid of the complete graph on ``n`` vertices (rank ``n - 1``)."""
    if not 1 <= n <= 6:
        raise ValueError(f"braid({n}) outside the explicit range 1..6")
    return from_graph(complete_graph(n))


# --------------------------------------------------------------------------
# rank oracles and flats
# --------------------------------------------------------------------------


def rank_of(m: Matroid, s: int) -> int:
    return int(m.rank_table[s])


def closure(m: Matroid, s: int) -> int:
    table = m.rank_table
    r = table[s]
    out = s
    for e in range(m.n):
        bit = 1 << e
        if not s & bit and table[s | bit] == r:
            out |= bit
    return out


def flats_lattice(m: Matroid) -> FlatLattice:
    flat = kernels.flat_table(m.n, m.rank_table)
    masks = np.flatnonzero(flat)
    ranks = m.rank_table[masks]
    by_rank = tuple(tuple(int(f) for f in masks[ranks == r]) for r in range(m.rank + 1))
    rank_of_flat = {int(f): int(r) for f, r in zip(masks, ranks)}
    return FlatLattice(m.n, by_rank, rank_of_flat)


# --------------------------------------------------------------------------
# duality, minors, sums
# --------------------------------------------------------------------------


def dual(m: Matroid) -> Matroid:
    full = m.ground
    return Matroid(m.n, tuple(full ^ b for b in m.bases))


def minor(m: Matroid, contract: int = 0, delete: int = 0) -> Matroid:
    """``M / contract \\ delete`` relabelled onto the surviving elements."""
    if contract & delete:
        raise ValueError("contract and delete sets overlap")
    b = m.bases_array
    if contract:
        r_c = int(m.rank_table[contract])
        b = b[np.bitwise_count(b & contract) == r_c] & ~contract
    if delete:
        kept = np.bitwise_count(b & ~delete)
        b = b[kept == kept.max()] & ~delete
    keep = m.ground & ~contract & ~delete
    packed = kernels.compress_masks(b, keep)
    return Matroid(_popcount(keep), tuple(int(x) for x in np.unique(packed)))


def delete(m: Matroid, e: int) -> Matroid:
    _check_element(m, e)
    return minor(m, delete=1 << e)


def contract(m: Matroid, e: int) -> Matroid:
    _check_element(m, e)
    return minor(m, contract=1 << e)


def restrict(m: Matroid, s: int) -> Matroid:
    return minor(m, delete=m.ground & ~s)


def relabel(m: Matroid, perm: Sequence[int], n: int | None = None) -> Matroid:
    """Send element ``i`` to ``perm[i]`` (an injection into ``range(n)``)."""
    n = m.n if n is None else n
    if len(perm) != m.n or len(set(perm)) != m.n or any(not 0 <= p < n for p in perm):
        raise ValueError("perm must be an injection of the ground set")
    out = kernels.permute_masks(m.bases_array, perm)
    return Matroid(n, tuple(int(x) for x in out))


def direct_sum(m1: Matroid, m2: Matroid) -> Matroid:
    if m1.n + m2.n > MAX_GROUND:
        raise ValueError(f"direct sum on {m1.n + m2.n} elements exceeds {MAX_GROUND}")
    shift = m1.n
    return Matroid(m1.n + m2.n, tuple(a | (b << shift) for a in m1.bases for b in m2.bases))


def _check_element(m: Matroid, e: int) -> None:
    if not 0 <= e < m.n:
        raise ValueError(f"element {e} not in a ground set of size {m.n}")


# --------------------------------------------------------------------------
# structure
# --------------------------------------------------------------------------


def loops(m: Matroid) -> int:
    union = 0
    for b in m.bases:
        union |= b
    return m.ground & ~union


def coloops(m: Matroid) -> int:
    inter = m.ground
    for b in m.bases:
        inter &= b
    return inter


def connected_components(m: Matroid) -> list[int]:
    """Connectivity classes as masks, ordered by least element.

    Uses the fundamental circuits of one basis: their union graph has the
    same components as the circuit relation.
    """
    base = m.bases[0]
    bases = m.basis_set
    uf = _UnionFind(m.n)
    for e in range(m.n):
        if base >> e & 1:
            continue
        for f in _bits(base):
            if (base & ~(1 << f)) | (1 << e) in bases:
                uf.union(e, f)
    blocks: dict[int, int] = {}
    for e in range(m.n):
        root = uf.find(e)
        blocks[root] = blocks.get(root, 0) | (1 << e)
    return sorted(blocks.values(), key=lambda b: (b & -b))


def is_connected(m: Matroid) -> bool:
    return len(connected_components(m)) == 1


def beta_invariant(m: Matroid) -> int:
    """Crapo's invariant ``(-1)^rk sum_S (-1)^|S| rk(S)``."""
    total = kernels.signed_rank_sum(m.n, m.rank_table)
    return -total if m.rank % 2 else total


def circuits(m: Matroid, size: int | None = None) -> list[int]:
    """Minimal dependent sets, optionally of one cardinality."""
    table = m.rank_table
    sizes = range(1, m.n + 1) if size is None else [size]
    out = []
    for k in sizes:
        for c in combinations(range(m.n), k):
            s = sum(1 << i for i in c)
            if table[s] != k - 1:
                continue
            if all(table[s & ~(1 << i)] == k - 1 for i in c):
                out.append(s)
    return out


def parallel_classes(m: Matroid) -> list[int]:
    """Parallel classes of the non-loop elements, ordered by least element."""
    table = m.rank_table
    lp = loops(m)
    classes: list[int] = []
    seen = lp
    for i in range(m.n):
        if seen >> i & 1:
            continue
        cls = 1 << i
        for j in range(i + 1, m.n):
            if not seen >> j & 1 and table[(1 << i) | (1 << j)] == 1:
                cls |= 1 << j
        seen |= cls
        classes.append(cls)
    return classes


def is_simple(m: Matroid) -> bool:
    if loops(m):
        return False
    table = m.rank_table
    return all(table[(1 << i) | (1 << j)] == 2 for i, j in combinations(range(m.n), 2))


def simplify(m: Matroid) -> tuple[Matroid, tuple[int | None, ...]]:
    """Simplification and the map ``element -> parallel class index``.

    Loops are dropped and map to ``None``. Class ``k`` is the ``k``-th class
    by least element, and becomes element ``k`` of the simplification.
    """
    classes = parallel_classes(m)
    class_of: list[int | None] = [None] * m.n
    reps = 0
    for k, cls in enumerate(classes):
        reps |= cls & -cls
        for e in _bits(cls):
            class_of[e] = k
    return restrict(m, reps), tuple(class_of)


def simplified_contraction(m: Matroid, flat: int) -> tuple[Matroid, list[int]]:
    """Simplification of ``M / flat`` together with its parallel classes.

    Works from the rank table of ``M``; classes are masks in ``M``'s labels.
    """
    table = m.rank_table
    r_f = int(table[flat])
    outside = [e for e in range(m.n) if not flat >> e & 1]
    nonloops = [e for e in outside if table[flat | (1 << e)] > r_f]
    classes: list[int] = []
    seen = 0
    for a, i in enumerate(nonloops):
        if seen >> i & 1:
            continue
        cls = 1 << i
        for j in nonloops[a + 1:]:
            if not seen >> j & 1 and table[flat | (1 << i) | (1 << j)] == r_f + 1:
                cls |= 1 << j
        seen |= cls
        classes.append(cls)
    reps = 0
    for cls in classes:
        reps |= cls & -cls
    b = m.bases_array
    b = b[np.bitwise_count(b & flat) == r_f] & ~flat
    b = b[(b & ~reps) == 0]
    packed = kernels.compress_masks(b, reps)
    return Matroid(len(classes), tuple(int(x) for x in np.unique(packed))), classes


def series_extension(m: Matroid, e: int, label: int | None = None) -> Matroid:
    """Add a new element forming a 2-cocircuit with ``e``.

    The new element gets ``label`` (default ``n``); existing elements at or
    above ``label`` shift up by one.
    """
    _check_element(m, e)
    if coloops(m) >> e & 1:
        raise ValueError(f"element {e} is a coloop; no series extension exists")
    new = 1 << m.n
    bases = [b | new for b in m.bases] + [b | (1 << e) for b in m.bases if not b >> e & 1]
    return _place_new(Matroid(m.n + 1, tuple(bases)), label)


def parallel_extension(m: Matroid, e: int, label: int | None = None) -> Matroid:
    """Add a new element forming a 2-circuit with ``e``."""
    _check_element(m, e)
    if loops(m) >> e & 1:
        raise ValueError(f"element {e} is a loop; no parallel extension exists")
    new = 1 << m.n
    bases = list(m.bases) + [(b & ~(1 << e)) | new for b in m.bases if b >> e & 1]
    return _place_new(Matroid(m.n + 1, tuple(bases)), label)


def _place_new(m: Matroid, label: int | None) -> Matroid:
    last = m.n - 1
    if label is None or label == last:
        return m
    if not 0 <= label <= last:
        raise ValueError(f"label {label} outside 0..{last}")
    perm = [i if i < label else i + 1 for i in range(last)] + [label]
    return relabel(m, perm)


# --------------------------------------------------------------------------
# series-parallel predicates
# --------------------------------------------------------------------------


def is_series_parallel(m: Matroid) -> bool:
    """Single loop, or beta invariant equal to one."""
    if m.n == 1 and m.rank == 0:
        return True
    return beta_invariant(m) == 1


def is_quasi_series_parallel(m: Matroid) -> bool:
    """Every connected component is series-parallel."""
    return all(is_series_parallel(restrict(m, c)) for c in connected_components(m))


def is_series_parallel_by_minors(m: Matroid) -> bool:
    """Connected and free of ``U_{2,4}`` and ``M(K_4)`` minors."""
    return is_connected(m) and not has_minor(m, "U24") and not has_minor(m, "MK4")


def is_quasi_series_parallel_by_minors(m: Matroid) -> bool:
    return not has_minor(m, "U24") and not has_minor(m, "MK4")


_TARGETS = {"U24": (4, 2), "MK4": (6, 3)}


def has_minor(m: Matroid, target: str) -> bool:
    """Whether ``m`` has a minor isomorphic to ``U_{2,4}`` or ``M(K_4)``.

    Every minor is ``M / C \\ D`` with ``C`` independent and ``D``
    coindependent, so the candidates are pairs ``(X, C)`` with ``|X|`` the
    target size and ``|C| = rk(M) - rk(target)``.
    """
    if target not in _TARGETS:
        raise ValueError(f"unknown minor target {target!r}; use 'U24' or 'MK4'")
    size, tr = _TARGETS[target]
    r = m.rank
    if m.n < size or r < tr or m.n - r < size - tr:
        return False
    table = m.rank_table
    full = m.ground
    need = r - tr
    k4 = None
    for xs in combinations(range(m.n), size):
        x = sum(1 << i for i in xs)
        rest = [e for e in range(m.n) if not x >> e & 1]
        pairs = [(1 << a) | (1 << b) for a, b in combinations(xs, 2)]
        for cs in combinations(rest, need):
            c = sum(1 << i for i in cs)
            if table[c] != need or table[x | c] != r:
                continue
            if any(table[c | p] != need + 2 for p in pairs):
                continue
            if target == "U24":
                return True
            triples = sum(
                1 for t in combinations(xs, 3) if table[c | sum(1 << i for i in t)] == need + 3
            )
            if triples != 16:
                continue
            if k4 is None:
                k4 = braid(4)
            if are_isomorphic(minor(m, contract=c, delete=full & ~x & ~c), k4):
                return True
    return False


# --------------------------------------------------------------------------
# isomorphism
# --------------------------------------------------------------------------


def _element_invariants(m: Matroid) -> list[tuple[int, int]]:
    degree = [0] * m.n
    for b in m.bases:
        for e in _bits(b):
            degree[e] += 1
    table = m.rank_table
    par = [0] * m.n
    for i in range(m.n):
        if table[1 << i] == 0:
            continue
        par[i] = sum(
            1 for j in range(m.n) if table[1 << j] == 1 and table[(1 << i) | (1 << j)] == 1
        )
    return list(zip(degree, par))


def _signature(m: Matroid) -> tuple:
    return (m.n, m.rank, len(m.bases), tuple(sorted(_element_invariants(m))))


def are_isomorphic(m1: Matroid, m2: Matroid) -> bool:
    """Backtracking search for a ground-set bijection carrying bases to bases.

    Candidates are pruned by per-element invariants, and each partial map is
    checked against the rank of every subset of the elements mapped so far.
    """
    if max(m1.n, m2.n) > MAX_ISOMORPHISM:
        raise ValueError(f"isomorphism search limited to {MAX_ISOMORPHISM} elements")
    if m1.n != m2.n or m1.rank != m2.rank or len(m1.bases) != len(m2.bases):
        return False
    if m1 == m2:
        return True
    inv1, inv2 = _element_invariants(m1), _element_invariants(m2)
    if sorted(inv1) != sorted(inv2):
        return False
    r1, r2 = m1.rank_table, m2.rank_table
    options = {e: [f for f in range(m2.n) if inv2[f] == inv1[e]] for e in range(m1.n)}
    order = sorted(range(m1.n), key=lambda e: (len(options[e]), e))

    def search(depth: int, used: int, sub1: np.ndarray, sub2: np.ndarray) -> bool:
        if depth == len(order):
            return True
        e = order[depth]
        for f in options[e]:
            if used >> f & 1:
                continue
            new1 = sub1 | (1 << e)
            new2 = sub2 | (1 << f)
            if np.array_equal(r1[new1], r2[new2]):
                if search(depth + 1, used | (1 << f), np.concatenate([sub1, new1]), np.concatenate([sub2, new2])):
                    return True
        return False

    start = np.zeros(1, dtype=np.int64)
    return search(0, 0, start, start.copy())


def isomorphism_classes(matroids: Iterable[Matroid]) -> list[list[Matroid]]:
    """Partition labelled matroids into isomorphism classes (first-seen order)."""
    buckets: dict[tuple, list[list[Matroid]]] = {}
    order: list[list[Matroid]] = []
    for m in matroids:
        groups = buckets.setdefault(_signature(m), [])
        for grp in groups:
            if are_isomorphic(grp[0], m):
                grp.append(m)
                break
        else:
            grp = [m]
            groups.append(grp)
            order.append(grp)
    return order


def check_basis_exchange(m: Matroid) -> bool:
    """Brute-force check of the basis exchange axiom."""
    bases = m.basis_set
    for a in m.bases:
        for b in m.bases:
            for x in _bits(a & ~b):
                if not any((a & ~(1 << x)) | (1 << y) in bases for y in _bits(b & ~a)):
                    return False
    return True
