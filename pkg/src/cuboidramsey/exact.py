"""Exact arithmetic for sums of rational multiples of square roots.

A :class:`RadicalScalar` is a finite sum ``q1*sqrt(d1) + q2*sqrt(d2) + ...``
with rational ``qi`` and distinct square-free positive radicands ``di``.
Square roots of distinct square-free integers are linearly independent over
the rationals, so two values are equal exactly when their canonical term maps
agree.  No sign testing is offered.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

FACTOR_BOUND = 10**6

Rational = Union[int, Fraction]


@lru_cache(maxsize=65536)
def square_free_split(n: int, bound: int = FACTOR_BOUND) -> tuple[int, int]:
    """Return ``(s, f)`` with ``n == s*s*f`` and ``f`` square-free.

    Trial division stops at ``bound``; a cofactor left over after that is
    kept whole in ``f`` (it may then hide an undetected square factor).
    """
    if n <= 0:
        raise ValueError(f"expected a positive integer, got {n}")
    s, f = 1, 1
    p = 2
    while p * p <= n and p <= bound:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            s *= p ** (e // 2)
            if e % 2:
                f *= p
        p += 1 if p == 2 else 2
    return s, f * n


def _as_fraction(x: Rational) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


class RadicalScalar:
    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, Rational] | None = None, *, _canonical: bool = False):
        if _canonical:
            self._terms = terms  # type: ignore[assignment]
        else:
            acc: dict[int, Fraction] = {}
            for d, q in (terms or {}).items():
                q = _as_fraction(q)
                if q == 0:
                    continue
                s, f = square_free_split(int(d))
                acc[f] = acc.get(f, Fraction(0)) + q * s
            self._terms = {d: acc[d] for d in sorted(acc) if acc[d] != 0}
        self._hash = None

    # construction -------------------------------------------------------

    @classmethod
    def rational(cls, q: Rational) -> RadicalScalar:
        q = _as_fraction(q)
        return cls({1: q} if q else {}, _canonical=True)

    @classmethod
    def coerce(cls, x: RadicalScalar | Rational) -> RadicalScalar:
        if isinstance(x, RadicalScalar):
            return x
        return cls.rational(x)

    # inspection ---------------------------------------------------------

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and 1 in self._terms)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self._terms.get(1, Fraction(0))

    def __float__(self) -> float:
        return math.fsum(float(q) * math.sqrt(d) for d, q in self._terms.items())

    # arithmetic ---------------------------------------------------------

    def __neg__(self) -> RadicalScalar:
        return RadicalScalar({d: -q for d, q in self._terms.items()}, _canonical=True)

    def __add__(self, other: RadicalScalar | Rational) -> RadicalScalar:
        if isinstance(other, (int, Fraction)):
            other = RadicalScalar.rational(other)
        elif not isinstance(other, RadicalScalar):
            return NotImplemented
        acc = dict(self._terms)
        for d, q in other._terms.items():
            v = acc.get(d, 0) + q
            if v:
                acc[d] = v
            else:
                acc.pop(d, None)
        return RadicalScalar({d: acc[d] for d in sorted(acc)}, _canonical=True)

    __radd__ = __add__

    def __sub__(self, other: RadicalScalar | Rational) -> RadicalScalar:
        if isinstance(other, (int, Fraction)):
            other = RadicalScalar.rational(other)
        elif not isinstance(other, RadicalScalar):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Rational) -> RadicalScalar:
        return RadicalScalar.coerce(other) - self

    def __mul__(self, other: RadicalScalar | Rational) -> RadicalScalar:
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return ZERO
            return RadicalScalar({d: q * other for d, q in self._terms.items()}, _canonical=True)
        if not isinstance(other, RadicalScalar):
            return NotImplemented
        acc: dict[int, Fraction] = {}
        for d1, q1 in self._terms.items():
            for d2, q2 in other._terms.items():
                # sqrt(d1)*sqrt(d2) = g*sqrt((d1/g)*(d2/g)); both factors stay square-free
                g = math.gcd(d1, d2)
                d = (d1 // g) * (d2 // g)
                acc[d] = acc.get(d, Fraction(0)) + q1 * q2 * g
        return RadicalScalar({d: acc[d] for d in sorted(acc) if acc[d]}, _canonical=True)

    __rmul__ = __mul__

    def __truediv__(self, other: Rational) -> RadicalScalar:
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return self * (1 / _as_fraction(other))

    def __pow__(self, k: int) -> RadicalScalar:
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = ONE
        for _ in range(k):
            out = out * self
        return out

    # comparison ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RadicalScalar.rational(other)
        if not isinstance(other, RadicalScalar):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __repr__(self) -> str:
        return f"RadicalScalar({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for d, q in self._terms.items():
            parts.append(str(q) if d == 1 else f"{q}*sqrt({d})")
        return " + ".join(parts)

    # serialization ------------------------------------------------------

    def to_triples(self) -> list[list[int]]:
        return [[q.numerator, q.denominator, d] for d, q in self._terms.items()]

    @classmethod
    def from_triples(cls, triples: Iterable[Sequence[int]]) -> RadicalScalar:
        acc: dict[int, Fraction] = {}
        for num, den, d in triples:
            if den == 0 or d <= 0:
                raise ValueError(f"bad radical triple {[num, den, d]}")
            acc[int(d)] = acc.get(int(d), Fraction(0)) + Fraction(int(num), int(den))
        return cls(acc)


ZERO = RadicalScalar({}, _canonical=True)
ONE = RadicalScalar({1: Fraction(1)}, _canonical=True)


def radical_sqrt(r: Rational) -> RadicalScalar:
    """Square root of a nonnegative rational, as ``q*sqrt(d)``.

    ``sqrt(p/q)`` is written as ``sqrt(p*q)/q`` before pulling squares out.
    """
    r = _as_fraction(r)
    if r < 0:
        raise ValueError(f"square root of negative rational {r}")
    if r == 0:
        return ZERO
    s, f = square_free_split(r.numerator * r.denominator)
    return RadicalScalar({f: Fraction(s, r.denominator)}, _canonical=True)


def add(x: RadicalScalar, y: RadicalScalar) -> RadicalScalar:
    return x + y


def sub(x: RadicalScalar, y: RadicalScalar) -> RadicalScalar:
    return x - y


def mul(x: RadicalScalar, y: RadicalScalar) -> RadicalScalar:
    return x * y


Vector = Union[Sequence[RadicalScalar], Mapping[int, RadicalScalar]]


def _items(v: Vector) -> Mapping[int, RadicalScalar]:
    if isinstance(v, Mapping):
        return v
    return {i: x for i, x in enumerate(v) if x}


def sq_norm_diff(p: Vector, q: Vector) -> RadicalScalar:
    """Exact squared Euclidean distance.

    Accepts dense sequences or sparse ``{axis: value}`` mappings; a shorter
    vector is padded with zeros.
    """
    p, q = _items(p), _items(q)
    total = ZERO
    for axis in set(p) | set(q):
        diff = p.get(axis, ZERO) - q.get(axis, ZERO)
        if diff:
            total = total + diff * diff
    return total


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"3"``, ``"3/4"`` or ``"0.75"`` into an exact Fraction."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    return Fraction(text.strip())
