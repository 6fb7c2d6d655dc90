"""Colourings, structured copies, certificates and small arrow checks."""
from __future__ import annotations

import itertools
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Hashable, Iterable, Iterator, Sequence

from .exact import Rational, sq_norm_diff
from .geometry import Configuration, cuboid_distance_profile
from .trees import Factor, FactorCopy, enumerate_copies_of_factor


class GuardExceeded(Exception):
    """An exhaustive search was asked to enumerate too much."""


class Colouring(Mapping):
    """Immutable map from point index (or product vertex) to an integer colour id."""

    def __init__(self, colours: Mapping[Hashable, int] | Sequence[int]):
        if isinstance(colours, Mapping):
            self._c = dict(colours)
        else:
            self._c = dict(enumerate(colours))

    def __getitem__(self, key: Hashable) -> int:
        return self._c[key]

    def __iter__(self) -> Iterator[Hashable]:
        return iter(self._c)

    def __len__(self) -> int:
        return len(self._c)

    def covers(self, keys: Iterable[Hashable]) -> bool:
        return all(k in self._c for k in keys)

    def recoloured(self, key: Hashable, colour: int) -> Colouring:
        out = dict(self._c)
        out[key] = colour
        return Colouring(out)

    def num_colours(self) -> int:
        return len(set(self._c.values()))

    def __repr__(self) -> str:
        return f"Colouring(<{len(self._c)} points, {self.num_colours()} colours>)"


def induced_product_colouring(c: Configuration, col: Mapping[int, int]) -> Colouring:
    """Re-key a point-index colouring by the configuration's vertex keys."""
    return Colouring({k: col[i] for k, i in c.phi.items()})


# -- monochromatic pairs ----------------------------------------------------

def find_mono_pairs_at(c: Configuration, col: Mapping[int, int], d2: Rational) -> list[tuple[int, int]]:
    """Every same-coloured unordered pair at squared distance exactly d2."""
    d2 = Fraction(d2)
    classes: dict[int, list[int]] = {}
    for i in range(len(c)):
        classes.setdefault(col[i], []).append(i)
    out = []
    for members in classes.values():
        for i, j in itertools.combinations(members, 2):
            if c.sq_dist(i, j) == d2:
                out.append((i, j))
    out.sort()
    return out


# -- tree colouring predicates ----------------------------------------------

def sibling_clash(factors: Sequence[Factor], col: Mapping) -> tuple[FactorCopy, Any, Any] | None:
    """First (copy, vertex, vertex) pair of same-coloured siblings, or None."""
    for i, tree in enumerate(factors):
        parents = [u for u in tree.vertices() if tree.num_children(u)]
        for cp in enumerate_copies_of_factor(i, factors):
            for u in parents:
                seen: dict[int, Any] = {}
                for ch in tree.children(u):
                    colour = col[cp.vertex(ch)]
                    if colour in seen:
                        return cp, seen[colour], ch
                    seen[colour] = ch
    return None


def is_sibling_proper(factors: Sequence[Factor], col: Mapping) -> bool:
    return sibling_clash(factors, col) is None


def is_proper_tree_colouring(copy: FactorCopy, col: Mapping, tree: Factor) -> bool:
    """Siblings differ, and no vertex repeats the colour of an ancestor."""
    stack = [((), frozenset())]
    while stack:
        u, above = stack.pop()
        colour = col[copy.vertex(u)]
        if colour in above:
            return False
        kids = tree.children(u)
        kid_colours = [col[copy.vertex(ch)] for ch in kids]
        if len(set(kid_colours)) != len(kid_colours):
            return False
        below = above | {colour}
        stack.extend((ch, below) for ch in kids)
    return True


def all_copies_proper(factors: Sequence[Factor], col: Mapping) -> bool:
    return all(is_proper_tree_colouring(cp, col, tree)
               for i, tree in enumerate(factors)
               for cp in enumerate_copies_of_factor(i, factors))


# -- structured targets -----------------------------------------------------

@dataclass(frozen=True)
class Target:
    """A configuration shape whose structured copies can be enumerated.

    ``kind`` is ``"pair"`` (sides2 = [d2]), ``"simplex"`` (k points, sides2 =
    [d2]) or ``"cuboid"`` (sides2 = [b1^2, ..., bs^2]).
    """

    kind: str
    sides2: tuple[Fraction, ...]
    k: int = 2

    @classmethod
    def pair(cls, d2: Rational) -> Target:
        return cls("pair", (Fraction(d2),), 2)

    @classmethod
    def simplex(cls, k: int, d2: Rational) -> Target:
        return cls("simplex", (Fraction(d2),), k)

    @classmethod
    def cuboid(cls, sides2: Sequence[Rational]) -> Target:
        return cls("cuboid", tuple(Fraction(x) for x in sides2), 1 << len(sides2))

    @classmethod
    def parse(cls, text: str) -> Target:
        """``pair:D2``, ``simplex:K:D2`` or ``cuboid:B2,B2,...``."""
        kind, _, rest = text.partition(":")
        if kind == "pair":
            return cls.pair(Fraction(rest))
        if kind == "simplex":
            k, d2 = rest.split(":")
            return cls.simplex(int(k), Fraction(d2))
        if kind == "cuboid":
            return cls.cuboid([Fraction(x) for x in rest.split(",")])
        raise ValueError(f"unknown target {text!r}")

    def size(self) -> int:
        return self.k

    def copies(self, c: Configuration) -> list[tuple[int, ...]]:
        """All structured copies as point-index tuples (cuboids ordered by corner mask)."""
        n = len(c)
        d = {}

        def dist(i: int, j: int):
            key = (i, j) if i < j else (j, i)
            if key not in d:
                d[key] = c.sq_dist(i, j)
            return d[key]

        if self.kind == "pair":
            return [(i, j) for i, j in itertools.combinations(range(n), 2)
                    if dist(i, j) == self.sides2[0]]
        if self.kind == "simplex":
            out = []

            def grow(chosen: list[int], start: int) -> None:
                if len(chosen) == self.k:
                    out.append(tuple(chosen))
                    return
                for j in range(start, n):
                    if all(dist(i, j) == self.sides2[0] for i in chosen):
                        chosen.append(j)
                        grow(chosen, j + 1)
                        chosen.pop()

            grow([], 0)
            return out
        s = len(self.sides2)
        out = []

        def expected(x: int, y: int) -> Fraction:
            return sum((self.sides2[i] for i in range(s) if (x ^ y) >> i & 1), Fraction(0))

        def assign(corners: list[int]) -> None:
            m = len(corners)
            if m == 1 << s:
                out.append(tuple(corners))
                return
            for j in range(n):
                if j in corners:
                    continue
                if all(dist(corners[x], j) == expected(x, m) for x in range(m)):
                    corners.append(j)
                    assign(corners)
                    corners.pop()

        for i in range(n):
            assign([i])
        return out


def is_mono(col: Mapping, pts: Iterable) -> bool:
    return len({col[p] for p in pts}) == 1


def is_rainbow(col: Mapping, pts: Sequence) -> bool:
    return len({col[p] for p in pts}) == len(pts)


def arrow_check(S: Configuration, r: int, target: Target | Rational,
                guard: int = 10**7) -> bool:
    """True iff every r-colouring of S has a monochromatic structured copy of target.

    Searches for an escaping colouring by backtracking over colourings in
    canonical form (each new point may use at most one unused colour).
    """
    if not isinstance(target, Target):
        target = Target.pair(target)
    if r ** len(S) > guard:
        raise GuardExceeded(f"{r}^{len(S)} colourings exceeds guard {guard}")
    copies = target.copies(S)
    # copies indexed by their largest point, so each is tested once all its points are coloured
    by_last: dict[int, list[tuple[int, ...]]] = {}
    for cp in copies:
        by_last.setdefault(max(cp), []).append(cp)
    colours = [0] * len(S)

    def extend(i: int, used: int) -> bool:
        if i == len(S):
            return True
        for colour in range(min(used + 1, r)):
            colours[i] = colour
            if any(len({colours[p] for p in cp}) == 1 for cp in by_last.get(i, ())):
                continue
            if extend(i + 1, max(used, colour + 1)):
                return True
        return False

    return not extend(0, 0)


# -- certificates -----------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    """A re-checkable witness.

    ``points`` are point indices into a configuration (for ``mono-pair``,
    ``mono-box``, ``rainbow-cuboid``) or grid cells (for ``rainbow-box``).
    ``claim`` holds ``d2`` or ``sides2`` (geometry kinds) or ``sets``
    (``rainbow-box``).
    """

    kind: str
    points: tuple
    claim: dict = field(default_factory=dict)
    labels: tuple = ()

    KINDS = ("mono-pair", "mono-box", "rainbow-box", "rainbow-cuboid")


def certificate_problems(cert: Certificate, col: Mapping,
                         config: Configuration | None = None) -> list[str]:
    """Everything wrong with ``cert``; an empty list means it verifies."""
    problems: list[str] = []
    pts = list(cert.points)
    if cert.kind not in Certificate.KINDS:
        return [f"unknown certificate kind {cert.kind!r}"]
    missing = [p for p in pts if p not in col]
    if missing:
        return [f"uncoloured points {missing}"]
    if cert.kind == "rainbow-box":
        sets = [list(s) for s in cert.claim.get("sets", [])]
        cells = {tuple(c) for c in itertools.product(*sets)}
        if {tuple(p) for p in pts} != cells or len(pts) != len(cells):
            problems.append("points are not the product of the claimed sets")
        if not is_rainbow(col, pts):
            problems.append("box is not rainbow")
        return problems
    if config is None:
        return ["geometric certificate needs a configuration"]
    if any(not (isinstance(p, int) and 0 <= p < len(config)) for p in pts):
        return ["point index out of range"]
    coords = [config.points[p] for p in pts]
    if cert.kind == "mono-pair":
        if len(pts) != 2 or pts[0] == pts[1]:
            problems.append("mono-pair needs two distinct points")
        elif sq_norm_diff(*coords) != Fraction(cert.claim["d2"]):
            problems.append("pair distance differs from claim")
        if not is_mono(col, pts):
            problems.append("pair is not monochromatic")
        return problems
    sides2 = [Fraction(x) for x in cert.claim["sides2"]]
    if len(pts) != 1 << len(sides2):
        return [f"expected {1 << len(sides2)} corners, got {len(pts)}"]
    if not cuboid_distance_profile(coords, sides2):
        problems.append("corner distances do not match the claimed sides")
    if cert.kind == "mono-box" and not is_mono(col, pts):
        problems.append("box is not monochromatic")
    if cert.kind == "rainbow-cuboid" and not is_rainbow(col, pts):
        problems.append("cuboid is not rainbow")
    return problems


def verify_certificate(cert: Certificate, col: Mapping,
                       config: Configuration | None = None) -> bool:
    return not certificate_problems(cert, col, config)
