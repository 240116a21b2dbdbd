"""Equivariant Kazhdan-Lusztig and Z-polynomials as class-function polynomials.

Virtual representations are handled through their characters. Groups are
finite permutation groups stored by explicit element lists (orders up to a
few hundred), so stabilisers, conjugacy classes and induced characters are
direct loops.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Callable, Hashable, Iterable, Sequence

from .exactmath import IntPolynomial
from .klcalc import braid_kl
from .matroid import (
    Matroid,
    braid,
    complete_graph,
    flats_lattice,
    loops,
    relabel,
    simplified_contraction,
    simplify,
)

__all__ = [
    "Perm",
    "PermGroup",
    "ClassFunction",
    "EquivariantPoly",
    "perm_character",
    "induce",
    "pullback",
    "equivariant_kl",
    "edge_action",
    "verify_theorem_equivariant",
]

Perm = tuple  # tuple[int, ...]: i -> p[i]


def _compose(a: Perm, b: Perm) -> Perm:
    """``a`` after ``b``."""
    return tuple(a[i] for i in b)


def _inverse(a: Perm) -> Perm:
    out = [0] * len(a)
    for i, j in enumerate(a):
        out[j] = i
    return tuple(out)


def _act_mask(p: Perm, mask: int) -> int:
    out = 0
    i = 0
    while mask:
        if mask & 1:
            out |= 1 << p[i]
        mask >>= 1
        i += 1
    return out


def cycle_type(p: Perm) -> tuple[int, ...]:
    seen = [False] * len(p)
    lengths = []
    for start in range(len(p)):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = p[i]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


def cycle_type_label(p: Perm) -> str:
    return "+".join(str(c) for c in cycle_type(p)) or "0"


class PermGroup:
    """Finite group of permutations of ``range(degree)``, listed element by element."""

    def __init__(self, degree: int, elements: Iterable[Sequence[int]]):
        elems = sorted({tuple(e) for e in elements})
        identity = tuple(range(degree))
        if identity not in elems:
            raise ValueError("group must contain the identity")
        for e in elems:
            if sorted(e) != list(identity):
                raise ValueError(f"{e} is not a permutation of range({degree})")
        elems.remove(identity)
        self.degree = degree
        self.elements: tuple[Perm, ...] = (identity, *elems)
        self.index = {e: i for i, e in enumerate(self.elements)}
        self._classes: list[tuple[Perm, ...]] | None = None
        self._class_of: dict[Perm, int] | None = None

    @classmethod
    def symmetric(cls, degree: int) -> "PermGroup":
        return cls(degree, permutations(range(degree)))

    @classmethod
    def trivial(cls, degree: int) -> "PermGroup":
        return cls(degree, [tuple(range(degree))])

    @classmethod
    def generated_by(cls, degree: int, gens: Iterable[Sequence[int]]) -> "PermGroup":
        identity = tuple(range(degree))
        gens = [tuple(g) for g in gens]
        seen = {identity}
        frontier = [identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = _compose(g, x)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return cls(degree, seen)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> Perm:
        return self.elements[0]

    def __contains__(self, p) -> bool:
        return tuple(p) in self.index

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other) -> bool:
        return isinstance(other, PermGroup) and self.degree == other.degree and self.elements == other.elements

    def __hash__(self) -> int:
        return hash((self.degree, self.elements))

    def is_closed(self) -> bool:
        return all(_compose(a, b) in self.index for a in self.elements for b in self.elements) and all(
            _inverse(a) in self.index for a in self.elements
        )

    def is_subgroup_of(self, other: "PermGroup") -> bool:
        return self.degree == other.degree and all(e in other.index for e in self.elements)

    def _build_classes(self) -> None:
        class_of: dict[Perm, int] = {}
        classes: list[tuple[Perm, ...]] = []
        inverses = [_inverse(x) for x in self.elements]
        for s in self.elements:
            if s in class_of:
                continue
            members = {_compose(xi, _compose(s, x)) for x, xi in zip(self.elements, inverses)}
            ordered = tuple(sorted(members, key=self.index.__getitem__))
            for t in ordered:
                class_of[t] = len(classes)
            classes.append(ordered)
        self._classes = classes
        self._class_of = class_of

    @property
    def classes(self) -> list[tuple[Perm, ...]]:
        """Conjugacy classes; the identity class comes first."""
        if self._classes is None:
            self._build_classes()
        return self._classes

    @property
    def class_of(self) -> dict[Perm, int]:
        if self._class_of is None:
            self._build_classes()
        return self._class_of

    def class_representatives(self) -> list[Perm]:
        return [c[0] for c in self.classes]

    def class_sizes(self) -> list[int]:
        return [len(c) for c in self.classes]

    def subgroup(self, elements: Iterable[Sequence[int]]) -> "PermGroup":
        sub = PermGroup(self.degree, elements)
        if not sub.is_subgroup_of(self):
            raise ValueError("elements are not inside the group")
        return sub

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, order={self.order})"


@dataclass(frozen=True, eq=False)
class ClassFunction:
    """Rational values on the conjugacy classes of ``group`` (in class order)."""

    group: PermGroup
    values: tuple[Fraction, ...]

    def __post_init__(self):
        vals = tuple(Fraction(v) for v in self.values)
        if len(vals) != len(self.group.classes):
            raise ValueError("one value per conjugacy class required")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_element_function(cls, group: PermGroup, f: Callable[[Perm], object]) -> "ClassFunction":
        return cls(group, tuple(f(rep) for rep in group.class_representatives()))

    @classmethod
    def constant(cls, group: PermGroup, value) -> "ClassFunction":
        return cls(group, (value,) * len(group.classes))

    @classmethod
    def trivial(cls, group: PermGroup) -> "ClassFunction":
        return cls.constant(group, 1)

    def __call__(self, p: Perm) -> Fraction:
        return self.values[self.group.class_of[tuple(p)]]

    def _same(self, other: "ClassFunction") -> None:
        if self.group != other.group:
            raise ValueError("class functions live on different groups")

    def __add__(self, other: "ClassFunction") -> "ClassFunction":
        self._same(other)
        return ClassFunction(self.group, tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "ClassFunction") -> "ClassFunction":
        self._same(other)
        return ClassFunction(self.group, tuple(a - b for a, b in zip(self.values, other.values)))

    def __mul__(self, c) -> "ClassFunction":
        return ClassFunction(self.group, tuple(v * c for v in self.values))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, ClassFunction) and self.group == other.group and self.values == other.values

    def __hash__(self) -> int:
        return hash(self.values)

    def is_zero(self) -> bool:
        return not any(self.values)

    @property
    def dimension(self) -> Fraction:
        return self.values[0]

    def is_nonnegative_integral(self) -> bool:
        return all(v.denominator == 1 and v >= 0 for v in self.values)

    def inner(self, other: "ClassFunction") -> Fraction:
        self._same(other)
        sizes = self.group.class_sizes()
        total = sum(s * a * b for s, a, b in zip(sizes, self.values, other.values))
        return Fraction(total, self.group.order)

    def by_cycle_type(self) -> dict[str, Fraction]:
        """Values keyed by cycle type; meaningful when cycle type determines the class."""
        return {cycle_type_label(rep): v for rep, v in zip(self.group.class_representatives(), self.values)}

    def __repr__(self) -> str:
        return f"ClassFunction({[str(v) for v in self.values]})"


@dataclass(frozen=True)
class EquivariantPoly:
    """Polynomial in ``t`` with class-function coefficients over one group."""

    rank: int
    coeffs: tuple[ClassFunction, ...]

    def __getitem__(self, i: int) -> ClassFunction:
        return self.coeffs[i]

    def __len__(self) -> int:
        return len(self.coeffs)

    def at_identity(self) -> IntPolynomial:
        return IntPolynomial(c.dimension for c in self.coeffs)

    def evaluate(self, p: Perm) -> list[Fraction]:
        return [c(p) for c in self.coeffs]


def perm_character(
    group: PermGroup,
    action: Callable[[Perm, Hashable], Hashable],
    points: Sequence[Hashable],
    check: bool = False,
) -> ClassFunction:
    """Character of the permutation representation: fixed points of each class representative.

    With ``check=True`` the action axioms are tested on the whole group.
    """
    points = list(points)
    if check:
        pts = set(points)
        for x in points:
            if action(group.identity, x) != x:
                raise ValueError("identity does not act trivially")
        for g in group.elements:
            for h in group.elements:
                gh = _compose(g, h)
                for x in points:
                    y = action(h, x)
                    if y not in pts or action(g, y) != action(gh, x):
                        raise ValueError("action is inconsistent with composition")
    return ClassFunction.from_element_function(
        group, lambda g: sum(1 for x in points if action(g, x) == x)
    )


def induce(sub: PermGroup, group: PermGroup, chi: ClassFunction) -> ClassFunction:
    """``(Ind chi)(s) = (1/|H|) sum_{x in G, x^-1 s x in H} chi(x^-1 s x)``."""
    if not sub.is_subgroup_of(group):
        raise ValueError("not a subgroup")
    if chi.group != sub:
        raise ValueError("character is not on the subgroup")
    pairs = [(x, _inverse(x)) for x in group.elements]

    def value(s: Perm) -> Fraction:
        total = Fraction(0)
        for x, xi in pairs:
            c = _compose(xi, _compose(s, x))
            if c in sub.index:
                total += chi(c)
        return total / sub.order

    return ClassFunction.from_element_function(group, value)


def pullback(group: PermGroup, hom: Callable[[Perm], Perm], target: PermGroup, chi: ClassFunction) -> ClassFunction:
    """``chi`` composed with a homomorphism ``group -> target``."""
    if chi.group != target:
        raise ValueError("character is not on the target group")
    return ClassFunction.from_element_function(group, lambda g: chi(hom(g)))


# --------------------------------------------------------------------------
# equivariant recursion
# --------------------------------------------------------------------------

_memo: dict[tuple, tuple[list[dict], list[dict]]] = {}
_memo_lock = threading.Lock()


def _classes_by_rep(elements: Sequence[Perm]) -> tuple[dict[Perm, Perm], list[Perm]]:
    rep_of: dict[Perm, Perm] = {}
    reps: list[Perm] = []
    inverses = [_inverse(x) for x in elements]
    for s in elements:
        if s in rep_of:
            continue
        reps.append(s)
        for x, xi in zip(elements, inverses):
            rep_of[_compose(xi, _compose(s, x))] = s
    return rep_of, reps


def _equivariant_simple(m: Matroid, elements: frozenset) -> tuple[list[dict], list[dict]]:
    """Values of ``P`` and ``Z`` coefficients at every element of a group acting on a simple matroid."""
    key = (m.key, elements)
    hit = _memo.get(key)
    if hit is not None:
        return hit
    group = sorted(elements)
    rep_of, reps = _classes_by_rep(group)
    d = m.rank
    tail = [{g: Fraction(0) for g in reps} for _ in range(d + 1)]
    lattice = flats_lattice(m)
    seen: set[int] = set()
    for r in range(1, d + 1):
        for flat in lattice.by_rank[r]:
            if flat in seen:
                continue
            orbit = {_act_mask(g, flat) for g in group}
            seen |= orbit
            rep = min(orbit)
            stab = [g for g in group if _act_mask(g, rep) == rep]
            sub, classes = simplified_contraction(m, rep)
            class_index = {c: i for i, c in enumerate(classes)}
            image = {g: tuple(class_index[_act_mask(g, c)] for c in classes) for g in stab}
            sub_p, _ = _equivariant_simple(sub, frozenset(image.values()))
            stab_set = set(stab)
            for j, coeff in enumerate(sub_p):
                for s in reps:
                    total = Fraction(0)
                    for x in group:
                        xi = _inverse(x)
                        c = _compose(xi, _compose(s, x))
                        if c in stab_set:
                            total += coeff[image[c]]
                    tail[r + j][s] += total / len(stab)
    p = []
    for i in range((d + 1) // 2 if d else 1):
        if d == 0:
            p.append({g: Fraction(1) for g in reps})
        else:
            p.append({g: tail[d - i][g] - tail[i][g] for g in reps})
    z = [dict(c) for c in tail]
    for i, c in enumerate(p):
        for g in reps:
            z[i][g] += c[g]
    full_p = [{g: c[rep_of[g]] for g in group} for c in p]
    full_z = [{g: c[rep_of[g]] for g in group} for c in z]
    while len(full_p) > 1 and not any(full_p[-1].values()):
        full_p.pop()
    result = (full_p, full_z)
    with _memo_lock:
        _memo.setdefault(key, result)
    return result


def equivariant_kl(
    m: Matroid,
    group: PermGroup,
    hom: Callable[[Perm], Perm] | None = None,
) -> tuple[EquivariantPoly, EquivariantPoly]:
    """Equivariant ``P`` and ``Z`` of a loopless matroid under a group action.

    ``hom`` sends each group element to the permutation of ``m``'s ground set
    it induces (default: the element itself). The computation runs on the
    simplification with the induced action on parallel classes and is
    pulled back to ``group``.
    """
    if loops(m):
        raise ValueError("equivariant_kl needs a loopless matroid")
    hom = hom or (lambda g: g)
    images = {g: tuple(hom(g)) for g in group.elements}
    for g, img in images.items():
        if len(img) != m.n or relabel(m, img) != m:
            raise ValueError(f"{g} does not act as an automorphism")
    simple, class_of = simplify(m)
    reps = [class_of.index(k) for k in range(simple.n)]
    on_classes = {g: tuple(class_of[img[e]] for e in reps) for g, img in images.items()}
    p_vals, z_vals = _equivariant_simple(simple, frozenset(on_classes.values()))

    def lift(values: list[dict]) -> tuple[ClassFunction, ...]:
        return tuple(
            ClassFunction.from_element_function(group, lambda g, c=c: c[on_classes[g]]) for c in values
        )

    p = EquivariantPoly(m.rank, lift(p_vals))
    z = EquivariantPoly(m.rank, lift(z_vals))
    if 2 * (len(p) - 1) >= max(m.rank, 1) and m.rank > 0:
        raise ArithmeticError(f"equivariant P has degree {len(p) - 1}, rank {m.rank}")
    return p, z


# --------------------------------------------------------------------------
# the braid matroid with a point stabiliser acting
# --------------------------------------------------------------------------


def edge_action(n: int) -> Callable[[Perm], Perm]:
    """Map a permutation of ``range(k)``, ``k <= n``, fixing the rest, to its action on ``K_n`` edges."""
    pairs = [tuple(sorted(e[:2])) for e in complete_graph(n).edges]
    label = {(u, v): lab for u, v, lab in complete_graph(n).edges}

    def act(sigma: Perm) -> Perm:
        full = tuple(sigma) + tuple(range(len(sigma), n))
        return tuple(label[tuple(sorted((full[u], full[v])))] for u, v in pairs)

    return act


def _json_value(v: Fraction):
    return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def verify_theorem_equivariant(n: int) -> dict:
    """Compare equivariant ``P``/``Z`` of ``K_n`` with permutation characters.

    The acting group is the symmetric group on the first ``n - 1`` vertices
    (the stabiliser of the last one). The ``t^i`` coefficients are compared,
    class by class, with the permutation characters on simple and on all
    quasi series-parallel matroids on ``[n-1]`` of rank ``n - 1 - i``.
    """
    from .spenum import enum_qsp

    if not 3 <= n <= 6:
        raise ValueError("equivariant verification supports 3 <= n <= 6")
    from .matroid import is_simple

    m = n - 1
    group = PermGroup.symmetric(m)
    p, z = equivariant_kl(braid(n), group, edge_action(n))
    qsp = enum_qsp(m)

    def act(sigma, mat):
        return relabel(mat, sigma)

    rows = []
    ok = True
    for kind, poly in (("P", p), ("Z", z)):
        for i in range(m + 1):
            family = qsp[m - i] if kind == "Z" else [x for x in qsp[m - i] if is_simple(x)]
            rhs = perm_character(group, act, family)
            lhs = poly[i] if i < len(poly) else ClassFunction.constant(group, 0)
            match = lhs == rhs
            ok &= match
            rows.append(
                {
                    "poly": kind,
                    "i": i,
                    "rank": m - i,
                    "equivariant": {k: _json_value(v) for k, v in lhs.by_cycle_type().items()},
                    "permutation_character": {k: _json_value(v) for k, v in rhs.by_cycle_type().items()},
                    "match": match,
                }
            )
    reference = braid_kl(n)
    dims_ok = p.at_identity() == reference.p and z.at_identity() == reference.z
    return {
        "n": n,
        "group": f"S_{m}",
        "rows": rows,
        "dimensions_match": dims_ok,
        "ok": ok and dims_ok,
    }
