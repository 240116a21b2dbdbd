"""Truncated bivariate power series in ``x`` with polynomial-in-``y`` coefficients.

A :class:`BivariateSeries` of order ``N`` stores, for each ``0 <= n <= N``, the
coefficient of ``x**n`` as a dense tuple of ``Fraction`` (lowest power of
``y`` first). ``y`` is only ever a parameter: no operation divides by it.

The pipeline at the bottom builds the exponential generating functions

* ``C(x, y)`` of labelled series-parallel matroids, by rank,
* ``A(x, y) = exp(C)`` of labelled quasi series-parallel matroids,
* ``S(x, y) = A(log(1 + x), y) / (1 + x) - 1`` of the simple ones,

and reads Z- and Kazhdan-Lusztig polynomials of braid matroids off them.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Sequence

from .exactmath import IntPolynomial

__all__ = [
    "DEFAULT_ORDER",
    "BivariateSeries",
    "series_mul",
    "series_exp",
    "log_one_plus",
    "series_reciprocal",
    "compose_x",
    "compositional_inverse_x",
    "lagrange_inverse_x",
    "integrate_x",
    "derivative_x",
    "phi_series",
    "build_C",
    "build_A",
    "build_S",
    "count_row",
    "z_poly_from_A",
    "kl_poly_from_S",
]

DEFAULT_ORDER = 12

YPoly = tuple  # tuple[Fraction, ...], lowest power first, no trailing zeros


def _ynorm(cs: Iterable) -> YPoly:
    out = [Fraction(c) for c in cs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _yadd(a: YPoly, b: YPoly) -> YPoly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _ynorm(out)


def _yscale(a: YPoly, c) -> YPoly:
    if c == 0:
        return ()
    return _ynorm(x * c for x in a)


def _ymul(a: YPoly, b: YPoly) -> YPoly:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, u in enumerate(a):
        if u:
            for j, v in enumerate(b):
                out[i + j] += u * v
    return _ynorm(out)


class BivariateSeries:
    """``sum_{n <= order} c_n(y) x**n`` with ``c_n`` a rational polynomial in ``y``."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Sequence[Iterable] = ()):
        if order < 0:
            raise ValueError("truncation order must be nonnegative")
        cs = [_ynorm(c) for c in list(coeffs)[: order + 1]]
        cs += [()] * (order + 1 - len(cs))
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("BivariateSeries is immutable")

    @classmethod
    def zero(cls, order: int) -> "BivariateSeries":
        return cls(order)

    @classmethod
    def one(cls, order: int) -> "BivariateSeries":
        return cls(order, [(1,)])

    @classmethod
    def x(cls, order: int) -> "BivariateSeries":
        return cls(order, [(), (1,)])

    @classmethod
    def from_x_coeffs(cls, order: int, values: Sequence) -> "BivariateSeries":
        """Series whose ``x**n`` coefficient is the constant ``values[n]``."""
        return cls(order, [(v,) for v in values])

    def __getitem__(self, n: int) -> YPoly:
        return self.coeffs[n] if 0 <= n <= self.order else ()

    def coeff(self, n: int, k: int) -> Fraction:
        c = self[n]
        return c[k] if k < len(c) else Fraction(0)

    def _check(self, other: "BivariateSeries") -> None:
        if not isinstance(other, BivariateSeries):
            raise TypeError(f"expected BivariateSeries, got {type(other).__name__}")
        if other.order != self.order:
            raise ValueError(f"truncation orders differ: {self.order} vs {other.order}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, BivariateSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.order, self.coeffs))

    def __add__(self, other: "BivariateSeries") -> "BivariateSeries":
        self._check(other)
        return BivariateSeries(self.order, [_yadd(a, b) for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "BivariateSeries":
        return BivariateSeries(self.order, [_yscale(a, -1) for a in self.coeffs])

    def __sub__(self, other: "BivariateSeries") -> "BivariateSeries":
        return self + (-other)

    def __mul__(self, other) -> "BivariateSeries":
        if isinstance(other, BivariateSeries):
            return series_mul(self, other)
        return BivariateSeries(self.order, [_yscale(a, other) for a in self.coeffs])

    __rmul__ = __mul__

    def times_y(self, power: int = 1) -> "BivariateSeries":
        return BivariateSeries(self.order, [(0,) * power + a if a else () for a in self.coeffs])

    def truncate(self, order: int) -> "BivariateSeries":
        return BivariateSeries(order, self.coeffs[: order + 1])

    def valuation(self) -> int:
        """Index of the first nonzero ``x`` coefficient (``order + 1`` if zero)."""
        for n, c in enumerate(self.coeffs):
            if c:
                return n
        return self.order + 1

    def __repr__(self) -> str:
        return f"BivariateSeries(order={self.order}, coeffs={[list(map(str, c)) for c in self.coeffs]})"


def series_mul(f: BivariateSeries, g: BivariateSeries) -> BivariateSeries:
    f._check(g)
    order = f.order
    out: list[YPoly] = [()] * (order + 1)
    for i, a in enumerate(f.coeffs):
        if not a:
            continue
        for j in range(order + 1 - i):
            b = g.coeffs[j]
            if b:
                out[i + j] = _yadd(out[i + j], _ymul(a, b))
    return BivariateSeries(order, out)


def derivative_x(f: BivariateSeries) -> BivariateSeries:
    """Termwise ``d/dx``; the top coefficient becomes unknown and is set to zero."""
    return BivariateSeries(f.order, [_yscale(f.coeffs[n], n) for n in range(1, f.order + 1)])


def integrate_x(f: BivariateSeries) -> BivariateSeries:
    """Antiderivative with zero constant term, kept at the same order.

    The ``x**order`` term of ``f`` would land at ``x**(order+1)`` and is lost.
    """
    out: list[YPoly] = [()]
    for n in range(f.order):
        out.append(_yscale(f.coeffs[n], Fraction(1, n + 1)))
    return BivariateSeries(f.order, out)


def series_exp(f: BivariateSeries) -> BivariateSeries:
    """``exp(f)`` for ``f`` without constant term, via ``n h_n = sum k f_k h_{n-k}``."""
    if f.coeffs[0]:
        raise ValueError("series_exp needs a zero constant term")
    h: list[YPoly] = [(Fraction(1),)]
    for n in range(1, f.order + 1):
        acc: YPoly = ()
        for k in range(1, n + 1):
            if f.coeffs[k] and h[n - k]:
                acc = _yadd(acc, _yscale(_ymul(f.coeffs[k], h[n - k]), k))
        h.append(_yscale(acc, Fraction(1, n)))
    return BivariateSeries(f.order, h)


def log_one_plus(g: BivariateSeries) -> BivariateSeries:
    """``log(1 + g) = sum_{m >= 1} (-1)^(m+1) g^m / m`` for ``g`` without constant term."""
    if g.coeffs[0]:
        raise ValueError("log_one_plus needs a zero constant term")
    out = BivariateSeries.zero(g.order)
    power = g
    m = 1
    while m <= g.order and power.valuation() <= g.order:
        sign = 1 if m % 2 else -1
        out = out + power * Fraction(sign, m)
        power = series_mul(power, g)
        m += 1
    return out


def series_reciprocal(f: BivariateSeries) -> BivariateSeries:
    """``1 / f`` for ``f`` with constant term exactly ``1``."""
    if f.coeffs[0] != (Fraction(1),):
        raise ValueError("series_reciprocal needs constant term 1")
    h: list[YPoly] = [(Fraction(1),)]
    for n in range(1, f.order + 1):
        acc: YPoly = ()
        for k in range(1, n + 1):
            if f.coeffs[k] and h[n - k]:
                acc = _yadd(acc, _ymul(f.coeffs[k], h[n - k]))
        h.append(_yscale(acc, -1))
    return BivariateSeries(f.order, h)


def compose_x(f: BivariateSeries, g: BivariateSeries) -> BivariateSeries:
    """``f(g(x, y), y)`` by Horner's rule; ``g`` must have no constant term."""
    f._check(g)
    if g.coeffs[0]:
        raise ValueError("compose_x needs an inner series without constant term")
    out = BivariateSeries(f.order, [f.coeffs[f.order]])
    for n in range(f.order - 1, -1, -1):
        out = series_mul(out, g) + BivariateSeries(f.order, [f.coeffs[n]])
    return out


def _check_invertible(f: BivariateSeries) -> None:
    if f.coeffs[0]:
        raise ValueError("compositional inverse needs a zero constant term")
    if f.order >= 1 and f.coeffs[1] != (Fraction(1),):
        raise ValueError("compositional inverse needs linear coefficient exactly 1")


def compositional_inverse_x(f: BivariateSeries) -> BivariateSeries:
    """Series ``g`` with ``f(g(x)) = x``, by Newton iteration in ``x``.

    Each step ``g <- g - (f(g) - x) / f'(g)`` doubles the number of correct
    coefficients, so the working order doubles alongside.
    """
    _check_invertible(f)
    order = f.order
    if order <= 1:
        return BivariateSeries.x(order)
    df = derivative_x(f)
    correct = 1
    g = BivariateSeries.x(order)
    while correct < order:
        prec = min(order, 2 * correct + 1)
        gp = g.truncate(prec)
        fp = f.truncate(prec)
        residual = compose_x(fp, gp) - BivariateSeries.x(prec)
        slope = compose_x(df.truncate(prec), gp)
        step = series_mul(residual, series_reciprocal(slope))
        g = BivariateSeries(order, (gp - step).coeffs)
        correct = prec
    return g


def lagrange_inverse_x(f: BivariateSeries) -> BivariateSeries:
    """Compositional inverse by Lagrange inversion.

    ``[x^n] g = (1/n) [u^(n-1)] (u / f(u))^n``. Slower than Newton and kept
    as an independent check.
    """
    _check_invertible(f)
    order = f.order
    shifted = BivariateSeries(order, list(f.coeffs[1:]))
    ratio = series_reciprocal(shifted)
    out: list[YPoly] = [()]
    power = BivariateSeries.one(order)
    for n in range(1, order + 1):
        power = series_mul(power, ratio)
        out.append(_yscale(power.coeffs[n - 1], Fraction(1, n)))
    return BivariateSeries(order, out)


def phi_series(order: int) -> BivariateSeries:
    """``(1/y) log(1 + x y) + log(1 + x) - x``, expanded so no ``1/y`` appears.

    The ``x**m`` coefficient is ``(-1)^(m+1) (y^(m-1) + 1) / m`` for ``m >= 2``
    and ``1`` for ``m = 1``.
    """
    coeffs: list[YPoly] = [()]
    for m in range(1, order + 1):
        sign = Fraction(1 if m % 2 else -1, m)
        c = [Fraction(0)] * m
        c[m - 1] += sign
        c[0] += sign
        if m == 1:
            c[0] -= 1
        coeffs.append(tuple(c))
    return BivariateSeries(order, coeffs)


@lru_cache(maxsize=None)
def build_C(order: int = DEFAULT_ORDER) -> BivariateSeries:
    """Labelled series-parallel matroids by size and rank: ``x(y+1) + y * int phi^<-1> dx``."""
    if order < 1:
        raise ValueError("build_C needs order >= 1")
    inverse = compositional_inverse_x(phi_series(order))
    correction = BivariateSeries(order, [(), (1, 1)])
    return correction + integrate_x(inverse).times_y()


@lru_cache(maxsize=None)
def build_A(order: int = DEFAULT_ORDER) -> BivariateSeries:
    """Labelled quasi series-parallel matroids: ``exp(C)``."""
    return series_exp(build_C(order))


@lru_cache(maxsize=None)
def build_S(order: int = DEFAULT_ORDER) -> BivariateSeries:
    """Labelled simple quasi series-parallel matroids: ``A(log(1+x), y)/(1+x) - 1``."""
    a = build_A(order)
    log1p = BivariateSeries.from_x_coeffs(
        order, [0] + [Fraction(1 if m % 2 else -1, m) for m in range(1, order + 1)]
    )
    geometric = BivariateSeries.from_x_coeffs(order, [(-1) ** m for m in range(order + 1)])
    s = series_mul(compose_x(a, log1p), geometric) - BivariateSeries.one(order)
    for n in range(order + 1):
        for k, c in enumerate(s[n]):
            scaled = c * factorial(n)
            if scaled.denominator != 1 or scaled < 0:
                raise ArithmeticError(f"n!*[x^{n} y^{k}] S = {scaled} is not a nonnegative integer")
    return s


def count_row(series: BivariateSeries, n: int) -> list[int]:
    """``n! [x^n y^k]`` for ``k = 0..n`` as integers."""
    if not 0 <= n <= series.order:
        raise ValueError(f"n={n} outside the truncation order {series.order}")
    out = []
    for k in range(n + 1):
        scaled = series.coeff(n, k) * factorial(n)
        if scaled.denominator != 1:
            raise ArithmeticError(f"n!*[x^{n} y^{k}] = {scaled} is not an integer")
        out.append(scaled.numerator)
    return out


def z_poly_from_A(a: BivariateSeries, n: int) -> IntPolynomial:
    """``Z`` of the braid matroid on ``n + 1`` vertices, from ``n! [x^n] A``."""
    return IntPolynomial(count_row(a, n))


def kl_poly_from_S(s: BivariateSeries, n: int) -> IntPolynomial:
    """Kazhdan-Lusztig polynomial of the braid matroid on ``n + 1`` vertices.

    ``n! [x^n] S`` is ``P`` reversed in degree ``n``. The constant term of
    ``S`` is zero by construction (the empty matroid is removed), so ``n = 0``
    returns the rank-zero value ``1`` directly.
    """
    if n == 0:
        if not 0 <= s.order:
            raise ValueError("empty series")
        return IntPolynomial([1])
    return IntPolynomial(count_row(s, n)).reversed_in(n)
