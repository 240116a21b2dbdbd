"""Exact integer polynomials and the combinatorial numbers used throughout.

Everything here works on Python ``int`` and ``fractions.Fraction``; no
floating point is involved anywhere in the package.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import zip_longest
from math import comb
from typing import Iterable, Iterator, Sequence

__all__ = [
    "IntPolynomial",
    "poly_is_palindromic",
    "poly_is_unimodal",
    "stirling2",
    "bell",
    "double_factorial",
    "binomial",
    "set_partitions",
    "as_int",
]


def as_int(value) -> int:
    """Convert an integral ``int``/``Fraction`` to ``int``; raise otherwise."""
    if isinstance(value, int):
        return value
    value = Fraction(value)
    if value.denominator != 1:
        raise ValueError(f"expected an integer, got {value}")
    return value.numerator


class IntPolynomial:
    """Univariate polynomial with integer coefficients, lowest degree first.

    Trailing zeros are stripped, so the zero polynomial has an empty
    coefficient tuple and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("IntPolynomial is immutable")

    @classmethod
    def monomial(cls, degree: int, coeff: int = 1) -> "IntPolynomial":
        return cls([0] * degree + [coeff])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i: int) -> int:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self) -> Iterator[int]:
        return iter(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, IntPolynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, int):
            return self.coeffs == IntPolynomial([other]).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other) -> "IntPolynomial":
        other = _coerce(other)
        return IntPolynomial(a + b for a, b in zip_longest(self.coeffs, other.coeffs, fillvalue=0))

    __radd__ = __add__

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(-c for c in self.coeffs)

    def __sub__(self, other) -> "IntPolynomial":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "IntPolynomial":
        return _coerce(other) - self

    def __mul__(self, other) -> "IntPolynomial":
        other = _coerce(other)
        if not self.coeffs or not other.coeffs:
            return IntPolynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def shift(self, k: int) -> "IntPolynomial":
        """Multiply by ``t**k``."""
        if not self.coeffs:
            return self
        return IntPolynomial([0] * k + list(self.coeffs))

    def reversed_in(self, d: int) -> "IntPolynomial":
        """Return ``t**d * p(1/t)``; requires ``d >= deg p``."""
        if self.degree > d:
            raise ValueError(f"degree {self.degree} exceeds {d}")
        padded = list(self.coeffs) + [0] * (d + 1 - len(self.coeffs))
        return IntPolynomial(reversed(padded))

    def __call__(self, t):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def to_list(self) -> list[int]:
        return list(self.coeffs) if self.coeffs else [0]

    def __repr__(self) -> str:
        return f"IntPolynomial({list(self.coeffs)})"

    def __str__(self) -> str:
        return self.format("t")

    def format(self, var: str = "t") -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                body = str(abs(c))
            else:
                mag = "" if abs(c) == 1 else str(abs(c))
                body = mag + (var if i == 1 else f"{var}^{i}")
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


def _coerce(value) -> IntPolynomial:
    if isinstance(value, IntPolynomial):
        return value
    if isinstance(value, int):
        return IntPolynomial([value])
    raise TypeError(f"cannot combine IntPolynomial with {type(value).__name__}")


def poly_is_palindromic(p: IntPolynomial | Sequence[int], d: int) -> bool:
    """True iff coefficient ``i`` equals coefficient ``d - i`` for ``0 <= i <= d``."""
    p = p if isinstance(p, IntPolynomial) else IntPolynomial(p)
    if p and p.degree > d:
        raise ValueError(f"degree {p.degree} exceeds stated degree {d}")
    return all(p[i] == p[d - i] for i in range(d + 1))


def poly_is_unimodal(p: IntPolynomial | Sequence[int]) -> bool:
    """True iff the coefficient sequence weakly rises and then weakly falls."""
    cs = list(p)
    i = 0
    while i + 1 < len(cs) and cs[i] <= cs[i + 1]:
        i += 1
    while i + 1 < len(cs) and cs[i] >= cs[i + 1]:
        i += 1
    return i >= len(cs) - 1


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    """Number of partitions of an ``n``-set into ``k`` nonempty blocks."""
    if n < 0 or k < 0:
        raise ValueError("stirling2 needs nonnegative arguments")
    if n == k:
        return 1
    if n == 0 or k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def bell(n: int) -> int:
    return sum(stirling2(n, k) for k in range(n + 1))


def double_factorial(m: int) -> int:
    """``m (m-2) (m-4) ...`` with the conventions ``(-1)!! = 0!! = 1``."""
    if m < -1:
        raise ValueError(f"double factorial undefined for {m}")
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def binomial(n: int, k: int) -> int:
    if k < 0 or n < 0 or k > n:
        return 0
    return comb(n, k)


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    """Yield every set partition of ``items`` as a list of blocks.

    Blocks keep the input order and are listed by their first element, so the
    output is deterministic.
    """
    items = list(items)
    if not items:
        yield []
        return

    def rec(i: int, blocks: list[list]):
        if i == len(items):
            yield [list(b) for b in blocks]
            return
        x = items[i]
        for b in blocks:
            b.append(x)
            yield from rec(i + 1, blocks)
            b.pop()
        blocks.append([x])
        yield from rec(i + 1, blocks)
        blocks.pop()

    yield from rec(0, [])
