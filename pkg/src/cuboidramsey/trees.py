"""Rooted trees addressed by child-index paths, and products of such trees.

A vertex is a :data:`TreeAddress`, the tuple of child indices leading from the
root (``()`` is the root).  A vertex of ``T_1 x ... x T_s`` is a
:data:`ProductVertex`, a tuple of addresses.  Products are streamed rather than
materialized wherever possible.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

TreeAddress = tuple[int, ...]
ProductVertex = tuple[TreeAddress, ...]


class InvalidAddress(ValueError):
    pass


class Relation(enum.Enum):
    EQUAL = "equal"
    SIBLINGS = "siblings"
    ANCESTOR_DESCENDANT = "ancestor-descendant"
    OTHER = "other"


def complete_size(n: int, h: int) -> int:
    """Vertex count of the complete n-ary tree of height h."""
    if n < 1 or h < 0:
        raise ValueError(f"bad complete tree n={n}, h={h}")
    if n == 1:
        return h + 1
    return (n ** (h + 1) - 1) // (n - 1)


class TreeShape:
    """Either a complete n-ary tree of height h, or an explicit rooted tree.

    Explicit trees come from a parent array (``parents[0] == -1`` for the
    root); children of a vertex are ordered by their index in that array.
    """

    def __init__(self, arity: int | None = None, height: int | None = None,
                 children: dict[TreeAddress, int] | None = None):
        self.arity = arity
        self.height = height
        self._children = children
        self.index_of: dict[TreeAddress, int] | None = None
        if children is None and (arity is None or height is None):
            raise ValueError("need arity and height, or an explicit child map")

    @classmethod
    def complete(cls, n: int, h: int) -> TreeShape:
        complete_size(n, h)
        return cls(arity=n, height=h)

    @classmethod
    def from_parents(cls, parents: Sequence[int]) -> TreeShape:
        if not parents or parents[0] != -1 or any(p == -1 for p in parents[1:]):
            raise ValueError("parent array must have a single root at index 0")
        addr: dict[int, TreeAddress] = {0: ()}
        counts: dict[TreeAddress, int] = {(): 0}
        pending = list(range(1, len(parents)))
        while pending:
            rest = []
            for v in pending:
                p = parents[v]
                if not 0 <= p < len(parents) or p == v:
                    raise ValueError(f"bad parent {p} for vertex {v}")
                if p in addr:
                    a = addr[p] + (counts[addr[p]],)
                    counts[addr[p]] += 1
                    addr[v] = a
                    counts[a] = 0
                else:
                    rest.append(v)
            if len(rest) == len(pending):
                raise ValueError("parent array contains a cycle")
            pending = rest
        shape = cls(children=counts)
        shape.index_of = {a: v for v, a in addr.items()}
        return shape

    @property
    def is_complete(self) -> bool:
        return self._children is None

    def num_children(self, u: TreeAddress) -> int:
        if self._children is None:
            return self.arity if len(u) < self.height else 0
        return self._children[u]

    def contains(self, u: TreeAddress) -> bool:
        if self._children is not None:
            return u in self._children
        return len(u) <= self.height and all(0 <= i < self.arity for i in u)

    def check(self, u: TreeAddress) -> None:
        if not self.contains(u):
            raise InvalidAddress(f"{list(u)} is not a vertex of this tree")

    def children(self, u: TreeAddress) -> list[TreeAddress]:
        return [u + (i,) for i in range(self.num_children(u))]

    def size(self) -> int:
        if self._children is None:
            return complete_size(self.arity, self.height)
        return len(self._children)

    def depth(self) -> int:
        if self._children is None:
            return self.height
        return max(len(u) for u in self._children)

    def max_arity(self) -> int:
        if self._children is None:
            return self.arity if self.height > 0 else 0
        return max(self._children.values())

    def vertices(self) -> Iterator[TreeAddress]:
        """All vertices in depth-first preorder, lowest child index first."""
        stack: list[TreeAddress] = [()]
        while stack:
            u = stack.pop()
            yield u
            stack.extend(reversed(self.children(u)))

    def internal_vertices(self) -> Iterator[TreeAddress]:
        return (u for u in self.vertices() if self.num_children(u))

    def describe(self) -> dict:
        if self._children is None:
            return {"arity": self.arity, "height": self.height}
        if self.index_of:
            order = sorted(self._children, key=self.index_of.__getitem__)
        else:
            order = list(self.vertices())
        index = {a: i for i, a in enumerate(order)}
        return {"parents": [-1 if not a else index[a[:-1]] for a in order]}

    @classmethod
    def from_description(cls, d: dict) -> TreeShape:
        if "parents" in d:
            return cls.from_parents(d["parents"])
        return cls.complete(int(d["arity"]), int(d["height"]))

    def __repr__(self) -> str:
        if self._children is None:
            return f"TreeShape.complete({self.arity}, {self.height})"
        return f"TreeShape(<{len(self._children)} vertices>)"


def is_ancestor(u: TreeAddress, v: TreeAddress) -> bool:
    """True when u is a strict ancestor of v."""
    return len(u) < len(v) and v[:len(u)] == u


def relation(u: TreeAddress, v: TreeAddress, tree: TreeShape | None = None) -> Relation:
    if tree is not None:
        tree.check(u)
        tree.check(v)
    if u == v:
        return Relation.EQUAL
    if len(u) == len(v) and u and u[:-1] == v[:-1]:
        return Relation.SIBLINGS
    if is_ancestor(u, v) or is_ancestor(v, u):
        return Relation.ANCESTOR_DESCENDANT
    return Relation.OTHER


def ancestors(u: TreeAddress) -> Iterator[TreeAddress]:
    """Strict ancestors of u, root first."""
    for k in range(len(u)):
        yield u[:k]


@dataclass(frozen=True)
class SubTree:
    """An address-preserving subtree of ``parent``: kept vertices and their kept children."""

    parent: TreeShape
    kept: dict[TreeAddress, tuple[TreeAddress, ...]] = field(hash=False)

    def vertices(self) -> Iterator[TreeAddress]:
        stack: list[TreeAddress] = [()]
        while stack:
            u = stack.pop()
            yield u
            stack.extend(reversed(self.kept[u]))

    def children(self, u: TreeAddress) -> tuple[TreeAddress, ...]:
        return self.kept[u]

    def num_children(self, u: TreeAddress) -> int:
        return len(self.kept[u])

    def contains(self, u: TreeAddress) -> bool:
        return u in self.kept

    def size(self) -> int:
        return len(self.kept)

    def is_subset_of(self, tree: TreeShape) -> bool:
        return all(tree.contains(u) for u in self.kept) and all(
            c[:-1] == u for u, cs in self.kept.items() for c in cs)

    def is_complete(self, n: int, h: int) -> bool:
        return (() in self.kept and self.size() == complete_size(n, h) and all(
            len(cs) == (n if len(u) < h else 0) for u, cs in self.kept.items()))

    def branch(self) -> list[TreeAddress]:
        """The root-to-leaf path of a unary subtree."""
        path = [()]
        while self.kept[path[-1]]:
            if len(self.kept[path[-1]]) != 1:
                raise ValueError("subtree is not unary")
            path.append(self.kept[path[-1]][0])
        return path


Factor = TreeShape | SubTree


@dataclass(frozen=True)
class FactorCopy:
    """The slice of a tree product obtained by fixing every coordinate but ``factor``."""

    factor: int
    fixed: ProductVertex  # coordinate ``factor`` holds the placeholder ()

    def vertex(self, u: TreeAddress) -> ProductVertex:
        return self.fixed[:self.factor] + (u,) + self.fixed[self.factor + 1:]

    def context(self) -> ProductVertex:
        return self.fixed[:self.factor] + self.fixed[self.factor + 1:]


def enumerate_copies_of_factor(i: int, product: Sequence[Factor]) -> Iterator[FactorCopy]:
    """Stream every copy of factor ``i`` (0-based) in the product."""
    if not 0 <= i < len(product):
        raise IndexError(f"factor index {i} out of range for {len(product)} factors")
    others = [list(t.vertices()) for j, t in enumerate(product) if j != i]
    for ctx in itertools.product(*others):
        yield FactorCopy(i, ctx[:i] + ((),) + ctx[i:])


def product_vertices(product: Sequence[Factor]) -> Iterator[ProductVertex]:
    return itertools.product(*(list(t.vertices()) for t in product))


def product_size(product: Sequence[Factor]) -> int:
    out = 1
    for t in product:
        out *= t.size()
    return out
