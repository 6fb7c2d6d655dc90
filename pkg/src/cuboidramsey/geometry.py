"""Tree-simplex configurations, their products, and cuboid decomposition.

Points are stored sparsely as ``{axis: RadicalScalar}`` with zero entries
omitted.  ``Configuration.phi`` maps a vertex key (a tree address, a tuple of
addresses for products, or a plain index) to a point index.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Hashable, Iterator, Sequence

import numpy as np

from .exact import ZERO, RadicalScalar, Rational, radical_sqrt, sq_norm_diff
from .trees import Relation, TreeAddress, TreeShape, ancestors, relation

Point = dict[int, RadicalScalar]


class BudgetExceeded(Exception):
    """A construction would materialize more points than allowed."""

    def __init__(self, estimate: int, budget: int, what: str = "configuration"):
        super().__init__(f"{what} needs {estimate} points, budget is {budget}")
        self.estimate = estimate
        self.budget = budget


@dataclass(frozen=True)
class Extension:
    """One leaf extension of the tree-simplex construction."""

    vertex: TreeAddress
    chain: tuple[int, ...]  # point indices of the vertex and its ancestors
    apex: Point
    children: tuple[int, ...]


@dataclass
class Configuration:
    points: list[Point]
    phi: dict[Hashable, int]
    dimension: int
    params: dict[str, Any] = field(default_factory=dict)
    shapes: list[TreeShape] = field(default_factory=list)
    factors: list[Configuration] = field(default_factory=list)
    extensions: list[Extension] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.points)

    def point(self, key: Hashable) -> Point:
        return self.points[self.phi[key]]

    def dense(self, i: int) -> list[RadicalScalar]:
        p = self.points[i]
        return [p.get(ax, ZERO) for ax in range(self.dimension)]

    def sq_dist(self, i: int, j: int) -> RadicalScalar:
        return sq_norm_diff(self.points[i], self.points[j])

    def keys(self) -> list[Hashable]:
        inv = [None] * len(self.points)
        for k, i in self.phi.items():
            inv[i] = k
        return inv

    def float_points(self) -> np.ndarray:
        out = np.zeros((len(self.points), self.dimension))
        for i, p in enumerate(self.points):
            for ax, v in p.items():
                out[i, ax] = float(v)
        return out


def _vertex_count_check(n: int, budget: int | None, what: str) -> None:
    if budget is not None and n > budget:
        raise BudgetExceeded(n, budget, what)


def build_tree_simplex(tree: TreeShape, a2: Rational, b2: Rational,
                       budget: int | None = None) -> Configuration:
    """Realize ``tree`` with sibling distance sqrt(a2) and ancestor distance sqrt(b2).

    Vertices are placed in depth-first preorder.  The first extension (at the
    root) puts the apex on a fresh axis at height ``b/sqrt(2)``; that apex is
    equidistant ``b/sqrt(2)`` from every later chain as well, so it is reused.
    Each extension then spends one lift axis and one private axis per child.
    """
    a2, b2 = Fraction(a2), Fraction(b2)
    if a2 <= 0 or b2 <= 0:
        raise ValueError("a^2 and b^2 must be positive")
    if a2 > b2:
        raise ValueError(f"a^2={a2} exceeds b^2={b2}; the lift sqrt((b^2-a^2)/2) is imaginary")
    _vertex_count_check(tree.size(), budget, "tree simplex")

    lift = radical_sqrt((b2 - a2) / 2)
    spread = radical_sqrt(a2 / 2)
    points: list[Point] = []
    phi: dict[Hashable, int] = {}
    extensions: list[Extension] = []
    apex: Point | None = None
    dim = 0
    pending: dict[TreeAddress, Point] = {(): {}}
    for u in tree.vertices():
        phi[u] = len(points)
        points.append(pending.pop(u))
        k = tree.num_children(u)
        if not k:
            continue
        if apex is None:
            apex = {dim: radical_sqrt(b2 / 2)}
            dim += 1
        lift_axis = dim
        dim += 1
        for i in range(k):
            w = dict(apex)
            if lift:
                w[lift_axis] = lift
            w[dim + i] = spread
            pending[u + (i,)] = w
        dim += k
        chain = tuple(phi[v] for v in ancestors(u)) + (phi[u],)
        extensions.append(Extension(u, chain, dict(apex), ()))
    # child point indices are known only after the traversal
    extensions = [Extension(e.vertex, e.chain, e.apex,
                            tuple(phi[c] for c in tree.children(e.vertex)))
                  for e in extensions]
    return Configuration(points, phi, dim,
                         params={"kind": "tree-simplex", "a2": a2, "b2": [b2]},
                         shapes=[tree], extensions=extensions)


def regular_simplex(k: int, d2: Rational) -> Configuration:
    """k points with all pairwise squared distances d2."""
    half = radical_sqrt(Fraction(d2) / 2)
    pts = [{i: half} for i in range(k)]
    return Configuration(pts, {i: i for i in range(k)}, k,
                         params={"kind": "simplex", "d2": Fraction(d2)})


def from_points(points: Sequence[Sequence[RadicalScalar | Rational]]) -> Configuration:
    """Wrap dense coordinate lists as a generic configuration."""
    pts = []
    dim = 0
    for row in points:
        dim = max(dim, len(row))
        pts.append({i: RadicalScalar.coerce(x) for i, x in enumerate(row) if x})
    return Configuration(pts, {i: i for i in range(len(pts))}, dim, params={"kind": "points"})


def product(configs: Sequence[Configuration], budget: int | None = None) -> Configuration:
    """Cartesian product on disjoint axis blocks; keys become tuples of factor keys."""
    if not configs:
        raise ValueError("product of an empty list")
    total = 1
    for c in configs:
        total *= len(c)
    _vertex_count_check(total, budget, "product")
    offsets = list(itertools.accumulate([0] + [c.dimension for c in configs[:-1]]))
    shifted = [[{ax + off: v for ax, v in p.items()} for p in c.points]
               for c, off in zip(configs, offsets)]
    factor_keys = [c.keys() for c in configs]
    points: list[Point] = []
    phi: dict[Hashable, int] = {}
    for combo in itertools.product(*(range(len(c)) for c in configs)):
        p: Point = {}
        for f, idx in enumerate(combo):
            p.update(shifted[f][idx])
        phi[tuple(factor_keys[f][idx] for f, idx in enumerate(combo))] = len(points)
        points.append(p)
    shapes = [s for c in configs for s in c.shapes] if all(
        len(c.shapes) == 1 for c in configs) else []
    return Configuration(points, phi, sum(c.dimension for c in configs),
                         params={"kind": "product",
                                 "factors": [dict(c.params) for c in configs]},
                         shapes=shapes, factors=list(configs))


# -- verification -----------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    kind: str  # "sibling" | "ancestor" | "private-axis" | "product"
    pair: tuple
    expected: Any
    actual: Any


@dataclass
class DistanceReport:
    violations: list[Violation] = field(default_factory=list)
    sibling_pairs: int = 0
    ancestor_pairs: int = 0
    private_axes: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def private_axis_owners(points: Sequence[Point]) -> dict[int, int]:
    """Map point index -> an axis on which it alone is nonzero."""
    holders: dict[int, list[int]] = {}
    for i, p in enumerate(points):
        for ax, v in p.items():
            if v:
                holders.setdefault(ax, []).append(i)
    owners: dict[int, int] = {}
    for ax in sorted(holders):
        if len(holders[ax]) == 1:
            owners.setdefault(holders[ax][0], ax)
    return owners


def _verify_tree_factor(c: Configuration, tree: TreeShape, a2: Fraction, b2: Fraction,
                        report: DistanceReport) -> None:
    verts = list(tree.vertices())
    for u, v in itertools.combinations(verts, 2):
        rel = relation(u, v)
        if rel is Relation.SIBLINGS:
            expected, kind = a2, "sibling"
            report.sibling_pairs += 1
        elif rel is Relation.ANCESTOR_DESCENDANT:
            expected, kind = b2, "ancestor"
            report.ancestor_pairs += 1
        else:
            continue
        d = sq_norm_diff(c.point(u), c.point(v))
        if d != expected:
            report.violations.append(Violation(kind, (u, v), expected, d))
    owners = private_axis_owners(c.points)
    for u in verts:
        if not u:
            continue
        if c.phi[u] in owners:
            report.private_axes += 1
        else:
            report.violations.append(Violation("private-axis", (u,), "owned axis", None))


def verify_distance_invariants(c: Configuration, samples: int = 20,
                               seed: int = 0) -> DistanceReport:
    """Exact check of sibling, ancestor and private-axis invariants.

    Products are checked factor by factor, then ``samples`` random point
    pairs are compared against the sum of their factor distances.
    """
    report = DistanceReport()
    if c.factors:
        for f in c.factors:
            sub = verify_distance_invariants(f, samples, seed)
            report.violations.extend(sub.violations)
            report.sibling_pairs += sub.sibling_pairs
            report.ancestor_pairs += sub.ancestor_pairs
            report.private_axes += sub.private_axes
        rng = random.Random(seed)
        keys = c.keys()
        for _ in range(min(samples, len(c) * len(c))):
            i, j = rng.randrange(len(c)), rng.randrange(len(c))
            expected = ZERO
            for f, (ki, kj) in enumerate(zip(keys[i], keys[j])):
                fc = c.factors[f]
                expected = expected + fc.sq_dist(fc.phi[ki], fc.phi[kj])
            actual = c.sq_dist(i, j)
            if actual != expected:
                report.violations.append(Violation("product", (keys[i], keys[j]), expected, actual))
        return report
    if len(c.shapes) == 1:
        _verify_tree_factor(c, c.shapes[0], Fraction(c.params["a2"]),
                            Fraction(c.params["b2"][0]), report)
    return report


def affine_rank(c: Configuration) -> int:
    """Floating-point rank of the difference vectors from point 0."""
    if len(c) < 2:
        return 0
    pts = c.float_points()
    return int(np.linalg.matrix_rank(pts[1:] - pts[0], tol=1e-6))


def centroid(points: Sequence[Point]) -> Point:
    acc: Point = {}
    for p in points:
        for ax, v in p.items():
            acc[ax] = acc.get(ax, ZERO) + v
    k = len(points)
    return {ax: v / k for ax, v in acc.items() if v}


# -- cuboids ----------------------------------------------------------------

@dataclass(frozen=True)
class Decomposition:
    b2: tuple[Fraction, ...]
    t: tuple[int, ...]
    a2: tuple[Fraction, ...]
    corners: tuple[Point, ...]  # 2^s corners of the diagonal copy of R inside R'

    def blocks(self) -> list[range]:
        starts = list(itertools.accumulate((0,) + self.t[:-1]))
        return [range(st, st + ti) for st, ti in zip(starts, self.t)]


def _ceil_div(p: Fraction, q: Fraction) -> int:
    r = p / q
    return -((-r.numerator) // r.denominator)


def decompose_cuboid(b2: Sequence[Rational]) -> Decomposition:
    """Split each side into ``t_i = ceil(b_i^2 / b_min^2)`` equal sides of R'."""
    b2 = tuple(Fraction(x) for x in b2)
    if not b2 or any(x <= 0 for x in b2):
        raise ValueError("cuboid sides must be positive")
    bmin2 = min(b2)
    t = tuple(_ceil_div(x, bmin2) for x in b2)
    a2 = tuple(x / ti for x, ti in zip(b2, t) for _ in range(ti))
    sides = [radical_sqrt(x) for x in a2]
    starts = list(itertools.accumulate((0,) + t[:-1]))
    corners = []
    for mask in range(1 << len(b2)):
        p: Point = {}
        for i, (st, ti) in enumerate(zip(starts, t)):
            if mask >> i & 1:
                for j in range(st, st + ti):
                    p[j] = sides[j]
        corners.append(p)
    return Decomposition(b2, t, a2, tuple(corners))


def cuboid_distance_profile(corners: Sequence[Point | Sequence[RadicalScalar]],
                            b2: Sequence[Rational]) -> bool:
    """Corner ``J`` (bit i set iff i in J) must sit at squared distance
    ``sum(b2[j] for j in J ^ K)`` from corner ``K``, exactly."""
    s = len(b2)
    if len(corners) != 1 << s:
        raise ValueError(f"expected {1 << s} corners, got {len(corners)}")
    b2 = [Fraction(x) for x in b2]
    for x, y in itertools.combinations(range(len(corners)), 2):
        diff = x ^ y
        expected = sum((b2[i] for i in range(s) if diff >> i & 1), Fraction(0))
        if sq_norm_diff(corners[x], corners[y]) != expected:
            return False
    return True


def iter_pairs_at(c: Configuration, d2: Rational) -> Iterator[tuple[int, int]]:
    d2 = Fraction(d2)
    for i, j in itertools.combinations(range(len(c)), 2):
        if c.sq_dist(i, j) == d2:
            yield i, j

