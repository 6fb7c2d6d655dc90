"""Parameter bounds and the selection algorithms that turn a colouring into a certificate.

All bounds are taken with equality, at the smallest integer satisfying them.
Greedy choices break ties by lowest child index / coordinate order.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .colouring import (Certificate, Colouring, certificate_problems,
                        find_mono_pairs_at, induced_product_colouring)
from .exact import Rational
from .geometry import (BudgetExceeded, Configuration, build_tree_simplex,
                       decompose_cuboid, iter_pairs_at, product)
from .trees import (Factor, SubTree, TreeAddress, TreeShape, complete_size,
                    enumerate_copies_of_factor)

DEFAULT_BUDGET = 10**6


class PreconditionError(ValueError):
    pass


class Starvation(RuntimeError):
    """A greedy step ran out of good candidates.

    Under valid preconditions the lemmas rule this out, so it signals a bug.
    """


class NoMonochromaticCopy(ValueError):
    """A slice carries no monochromatic listed copy; hunt for a rainbow R instead."""

    def __init__(self, point: Hashable):
        super().__init__(f"slice at {point!r} has no monochromatic listed copy")
        self.point = point


class CertificateError(RuntimeError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


def _prod(xs: Iterable[int]) -> int:
    return math.prod(xs)


# -- parameter calculators --------------------------------------------------

def lemma3_params(h: int, nprime: Sequence[int]) -> list[int]:
    """Tree arities n_1..n_s, chosen from n_s down to n_1.

    n_i = n'_i + h * n'_1...n'_{i-1} * n_{i+1}...n_s
    """
    if h < 1 or not nprime or any(x < 1 for x in nprime):
        raise ValueError("h and every n' must be positive integers")
    s = len(nprime)
    n = [0] * s
    for i in reversed(range(s)):
        n[i] = nprime[i] + h * _prod(nprime[:i]) * _prod(n[i + 1:])
    return n


def lemma4_params(mprime: Sequence[int]) -> list[int]:
    """Side lengths m_1..m_s forcing a rainbow m'_1 x ... x m'_s sub-box."""
    if not mprime or any(x < 1 for x in mprime):
        raise ValueError("every m' must be a positive integer")
    if len(mprime) == 1:
        return [mprime[0]]
    m = lemma4_params(mprime[:-1])
    choices = _prod(math.comb(mj, mpj) for mj, mpj in zip(m, mprime))
    slice_size = _prod(mprime[:-1])
    return m + [choices * slice_size ** 2 * mprime[-1]]


@dataclass(frozen=True)
class CPlan:
    a2: Fraction
    b2: tuple[Fraction, ...]
    m: tuple[int, ...]
    h: int
    n: tuple[int, ...]
    factor_sizes: tuple[int, ...]

    @property
    def total(self) -> int:
        return _prod(self.factor_sizes)

    def as_dict(self) -> dict:
        return {"a2": self.a2, "b2": list(self.b2), "m": list(self.m), "h": self.h,
                "n": list(self.n), "factor_sizes": list(self.factor_sizes),
                "total_points": self.total}


def plan_C(a2: Rational, b2: Sequence[Rational], mprime: Sequence[int] | None = None) -> CPlan:
    a2 = Fraction(a2)
    b2 = tuple(Fraction(x) for x in b2)
    if not b2:
        raise ValueError("need at least one side")
    if a2 <= 0 or a2 > min(b2):
        raise ValueError(f"need 0 < a^2 <= min b_i^2, got a^2={a2}, b^2={list(b2)}")
    mprime = list(mprime) if mprime is not None else [2] * len(b2)
    m = lemma4_params(mprime)
    h = max(m)
    n = lemma3_params(h, [1] * len(b2))
    return CPlan(a2, b2, tuple(m), h, tuple(n), tuple(complete_size(k, h) for k in n))


def build_C(a2: Rational, b2: Sequence[Rational], mprime: Sequence[int] | None = None,
            budget: int | None = DEFAULT_BUDGET) -> Configuration:
    """The product of tree simplices D(T_i, a, b_i) over complete n_i-ary trees of height h.

    Raises :class:`BudgetExceeded` carrying the exact point count before
    building anything when the product is larger than ``budget``.
    """
    plan = plan_C(a2, b2, mprime)
    if budget is not None and plan.total > budget:
        raise BudgetExceeded(plan.total, budget, "C(a)")
    factors = [build_tree_simplex(TreeShape.complete(n, plan.h), plan.a2, b)
               for n, b in zip(plan.n, plan.b2)]
    c = product(factors)
    c.params = {"kind": "C", "a2": plan.a2, "b2": list(plan.b2), "m": list(plan.m),
                "h": plan.h, "n": list(plan.n)}
    return c


def sibling_pair_count(n: int, h: int) -> int:
    return (complete_size(n, h) - (n ** h if n > 1 else 1)) * math.comb(n, 2) if h else 0


def count_pairs_in_C(plan: CPlan, d2: Rational | None = None) -> int:
    """Pairs at squared distance d2 (default a^2) in C(a), without building it.

    Inside one factor every distinct pair that is not a sibling pair sits at
    b_i^2 >= a^2, so pairs differing in two or more factors are at least 2a^2
    apart; only single-factor pairs can qualify.
    """
    d2 = plan.a2 if d2 is None else Fraction(d2)
    total = 0
    for i, (n, b2) in enumerate(zip(plan.n, plan.b2)):
        size = plan.factor_sizes[i]
        per_factor = 0
        if d2 == plan.a2:
            per_factor += sibling_pair_count(n, plan.h)
        if d2 == b2:
            per_factor += math.comb(size, 2) - sibling_pair_count(n, plan.h)
        total += per_factor * _prod(plan.factor_sizes[:i] + plan.factor_sizes[i + 1:])
    return total


def count_structured_box_copies(factors: Sequence[Configuration | int],
                                a2: Sequence[Rational]) -> int:
    """Copies of {0,a_1} x ... x {0,a_k} built as products of exact distance pairs.

    A factor given as an int is taken to be its pair count already.
    """
    if len(factors) != len(a2):
        raise ValueError("one squared side per factor")
    total = 1
    for f, d2 in zip(factors, a2):
        total *= f if isinstance(f, int) else sum(1 for _ in iter_pairs_at(f, d2))
    return total


def theorem1_params(b2: Sequence[Rational], later_pair_counts: Sequence[int] = ()) -> dict:
    """t, a_j^2 and the colour budgets m_2, m_3, ... for the product witness.

    m_2 is the exact number of a_1-pairs of C(a_1).  Later m_i need the pair
    counts of the Ramsey witnesses S_2, S_3, ..., which are only known when
    supplied through ``later_pair_counts``.
    """
    dec = decompose_cuboid(b2)
    plan = plan_C(dec.a2[0], dec.b2)
    pair_counts = [count_pairs_in_C(plan)] + list(later_pair_counts)
    # m[0] is m_2
    m = [_prod(pair_counts[:i]) for i in range(1, min(len(pair_counts), len(dec.a2) - 1) + 1)]
    return {"t": list(dec.t), "a2": list(dec.a2), "C_a1": plan.as_dict(),
            "pair_counts": pair_counts, "m_from_2": m}


# -- refining to properly coloured subtrees ---------------------------------

@dataclass
class RefineResult:
    subtrees: list[SubTree]
    log: list[dict] = field(default_factory=list)


def _bad_vertices(tree: TreeShape, i: int, current: Sequence[Factor],
                  col: Mapping) -> tuple[set[TreeAddress], int]:
    bad: set[TreeAddress] = set()
    copies = 0
    for cp in enumerate_copies_of_factor(i, current):
        copies += 1
        stack = [((), frozenset())]
        while stack:
            u, above = stack.pop()
            colour = col[cp.vertex(u)]
            if colour in above:
                bad.add(u)
            below = above | {colour}
            stack.extend((ch, below) for ch in tree.children(u))
    return bad, copies


def _greedy_subtree(tree: TreeShape, bad: set[TreeAddress], k: int, i: int) -> SubTree:
    kept: dict[TreeAddress, tuple[TreeAddress, ...]] = {}
    frontier = [()]
    while frontier:
        u = frontier.pop()
        kids = tree.children(u)
        if kids:
            good = [ch for ch in kids if ch not in bad][:k]
            if len(good) < k:
                raise Starvation(f"factor {i}: vertex {list(u)} has {len(good)} good "
                                 f"children, needs {k}")
            kept[u] = tuple(good)
            frontier.extend(reversed(good))
        else:
            kept[u] = ()
    return SubTree(tree, kept)


def _candidate_subtrees(tree: TreeShape, k: int, ok: Callable[[TreeAddress], bool],
                        u: TreeAddress = ()) -> Iterator[dict]:
    """Complete k-ary subtrees below u using only vertices passing ``ok``, in index order."""
    kids = [ch for ch in tree.children(u) if ok(ch)]
    if not tree.children(u):
        yield {u: ()}
        return
    for chosen in itertools.combinations(kids, k):
        for parts in itertools.product(*(list(_candidate_subtrees(tree, k, ok, ch))
                                         for ch in chosen)):
            kept = {u: chosen}
            for part in parts:
                kept.update(part)
            yield kept


def _search_subtrees(shapes: Sequence[TreeShape], col: Mapping, nprime: Sequence[int],
                     limit: int) -> list[SubTree] | None:
    from .colouring import all_copies_proper
    pools = []
    for i, tree in enumerate(shapes):
        # every subtree keeps the root, so the all-root context is a necessary filter
        bad, _ = _bad_vertices(tree, i, [t if j == i else SubTree(t, {(): ()})
                                         for j, t in enumerate(shapes)], col)
        pools.append([SubTree(tree, kept) for kept in
                      itertools.islice(_candidate_subtrees(tree, nprime[i],
                                                           lambda u: u not in bad), limit)])
    tried = 0
    for combo in itertools.product(*pools):
        tried += 1
        if tried > limit:
            return None
        if all_copies_proper(list(combo), col):
            return list(combo)
    return None


def refine_proper_trees(shapes: Sequence[TreeShape], col: Mapping,
                        nprime: Sequence[int], search_limit: int = 10**5) -> RefineResult:
    """Pick complete n'_i-ary subtrees whose copies are all properly coloured.

    Factors are processed in order.  A vertex of T_i is bad if, in some copy of
    T_i inside the current product, it repeats an ancestor's colour; each kept
    non-leaf keeps its first n'_i good children.

    The stagewise count of bad children only closes when n_i exceeds h times
    the number of *vertices* of the other factors.  Below that (as with the
    arity-based bound of :func:`lemma3_params`, s >= 2) the greedy pass can
    starve; a joint search over subtree choices (at most ``search_limit``
    combinations) is then tried, and the log records which route succeeded.
    """
    if len(shapes) != len(nprime):
        raise ValueError("one n' per factor")
    current: list[Factor] = list(shapes)
    result = RefineResult([])
    try:
        for i, tree in enumerate(shapes):
            bad, copies = _bad_vertices(tree, i, current, col)
            sub = _greedy_subtree(tree, bad, nprime[i], i)
            current[i] = sub
            result.subtrees.append(sub)
            result.log.append({"factor": i, "method": "greedy", "copies": copies,
                               "bad": len(bad), "kept": sub.size()})
    except Starvation as exc:
        if search_limit <= 0:
            raise
        found = _search_subtrees(shapes, col, nprime, search_limit)
        if found is None:
            raise Starvation(f"{exc}; joint search over {search_limit} combinations "
                             "found no properly coloured product either") from exc
        result.log.append({"method": "search", "greedy_starved": str(exc)})
        result.subtrees = found
    return result


def lemma3_params_sound(h: int, nprime: Sequence[int]) -> list[int]:
    """Arities for which the stagewise greedy refinement provably never starves.

    n_i = n'_i + h * |T'_1|...|T'_{i-1}| * |T_{i+1}|...|T_s|, with |T| the
    vertex count of the complete tree of height h.
    """
    if h < 1 or not nprime or any(x < 1 for x in nprime):
        raise ValueError("h and every n' must be positive integers")
    s = len(nprime)
    n = [0] * s
    for i in reversed(range(s)):
        n[i] = nprime[i] + h * _prod(complete_size(k, h) for k in nprime[:i]) \
            * _prod(complete_size(k, h) for k in n[i + 1:])
    return n


# -- rainbow sub-boxes ------------------------------------------------------

def differ_in_one_clash(sets: Sequence[Sequence[Hashable]], col: Mapping) -> tuple | None:
    """First pair of cells differing in one coordinate with equal colours, or None."""
    for i in range(len(sets)):
        others = [s for j, s in enumerate(sets) if j != i]
        for ctx in itertools.product(*others):
            seen: dict[int, tuple] = {}
            for y in sets[i]:
                cell = ctx[:i] + (y,) + ctx[i:]
                c = col[cell]
                if c in seen:
                    return seen[c], cell
                seen[c] = cell
    return None


def _rainbow_box(sets: Sequence[Sequence[Hashable]], colour: Callable[[tuple], int],
                 mprime: Sequence[int]) -> list[list[Hashable]]:
    if len(sets) == 1:
        return [list(sets[0][:mprime[0]])]
    groups: dict[tuple, list[Hashable]] = {}
    for y in sets[-1]:
        sub = _rainbow_box(sets[:-1], lambda cell, y=y: colour(cell + (y,)), mprime[:-1])
        groups.setdefault(tuple(tuple(b) for b in sub), []).append(y)
    choice, candidates = max(groups.items(), key=lambda kv: len(kv[1]))
    cells = list(itertools.product(*choice))
    used: set[int] = set()
    picked: list[Hashable] = []
    for y in candidates:
        if len(picked) == mprime[-1]:
            break
        colours = [colour(cell + (y,)) for cell in cells]
        if used.isdisjoint(colours):
            picked.append(y)
            used.update(colours)
    if len(picked) < mprime[-1]:
        raise Starvation(f"only {len(picked)} of {mprime[-1]} good values in coordinate "
                         f"{len(sets) - 1} ({len(candidates)} candidates)")
    return [list(b) for b in choice] + [picked]


def extract_rainbow_box(sets: Sequence[Sequence[Hashable]], col: Mapping,
                        mprime: Sequence[int]) -> tuple[list[list[Hashable]], Certificate]:
    """Rainbow B'_1 x ... x B'_s with |B'_i| = m'_i inside a grid whose lines are rainbow."""
    if len(sets) != len(mprime):
        raise ValueError("one m' per coordinate")
    need = lemma4_params(mprime)
    short = [(i, len(s), m) for i, (s, m) in enumerate(zip(sets, need)) if len(s) < m]
    if short:
        raise PreconditionError(f"coordinate sets too small (index, size, needed): {short}")
    clash = differ_in_one_clash(sets, col)
    if clash is not None:
        raise PreconditionError(f"cells {clash[0]} and {clash[1]} differ in one coordinate "
                                "but share a colour")
    chosen = _rainbow_box(sets, lambda cell: col[cell], mprime)
    cells = tuple(itertools.product(*chosen))
    cert = Certificate("rainbow-box", cells, {"sets": chosen})
    problems = certificate_problems(cert, col)
    if problems:
        raise CertificateError(problems)
    return chosen, cert


# -- pair-or-rainbow-cuboid pipeline ----------------------------------------

def lemma2_pipeline(C: Configuration, col: Mapping[int, int]) -> Certificate:
    """Monochromatic {0,a} pair, or a rainbow copy of the cuboid with sides b_i."""
    if C.params.get("kind") == "tree-simplex":
        C = product([C])
        C.params = {"kind": "C", "a2": C.factors[0].params["a2"],
                    "b2": C.factors[0].params["b2"], "m": [2], "h": C.shapes[0].depth(),
                    "n": [C.shapes[0].max_arity()]}
    if C.params.get("kind") != "C":
        raise ValueError("lemma2_pipeline needs a configuration built by build_C")
    a2 = Fraction(C.params["a2"])
    b2 = [Fraction(x) for x in C.params["b2"]]
    m = C.params["m"]
    s = len(b2)
    if not isinstance(col, Mapping):
        col = Colouring(col)
    if not all(i in col for i in range(len(C))):
        raise PreconditionError("colouring is not total on the configuration")

    pairs = find_mono_pairs_at(C, col, a2)
    if pairs:
        cert = Certificate("mono-pair", pairs[0], {"d2": a2}, labels=tuple(C.keys()[i] for i in pairs[0]))
    else:
        pcol = induced_product_colouring(C, col)
        refined = refine_proper_trees(C.shapes, pcol, [1] * s)
        branches = [sub.branch()[:mi] for sub, mi in zip(refined.subtrees, m)]
        chosen, _ = extract_rainbow_box(branches, pcol, [2] * s)
        ends = [sorted(pair, key=len) for pair in chosen]
        labels = []
        for mask in range(1 << s):
            labels.append(tuple(ends[i][mask >> i & 1] for i in range(s)))
        cert = Certificate("rainbow-cuboid", tuple(C.phi[v] for v in labels),
                           {"sides2": b2}, labels=tuple(labels))
    problems = certificate_problems(cert, col, C)
    if problems:
        raise CertificateError(problems)
    return cert


# -- product induction step -------------------------------------------------

def build_aux_colouring(col: Mapping[tuple, int], copies: Sequence[Sequence[Hashable]],
                        b_keys: Iterable[Hashable]) -> Colouring:
    """chi(x) = index of the first listed copy R with R x {x} monochromatic.

    ``col`` is keyed by ``(a_key, x)`` pairs.  Uses at most ``len(copies)`` colours.
    """
    chi = {}
    for x in b_keys:
        for idx, cp in enumerate(copies):
            if len({col[(a, x)] for a in cp}) == 1:
                chi[x] = idx
                break
        else:
            raise NoMonochromaticCopy(x)
    return Colouring(chi)


def promote_mono_box(AB: Configuration, col: Mapping[int, int], r_star: Sequence[Hashable],
                     pair: tuple[Hashable, Hashable], sides2: Sequence[Rational]) -> Certificate:
    """Certificate for the monochromatic box R* x I inside the product A x B.

    ``r_star`` lists the corners of R* by mask; the pair I supplies the top bit.
    """
    k = len(sides2)
    if len(r_star) != 1 << (k - 1):
        raise ValueError(f"R* needs {1 << (k - 1)} corners for {k} sides")
    low = (1 << (k - 1)) - 1
    labels = tuple((r_star[mask & low], pair[mask >> (k - 1)]) for mask in range(1 << k))
    cert = Certificate("mono-box", tuple(AB.phi[v] for v in labels),
                       {"sides2": [Fraction(x) for x in sides2]}, labels=labels)
    problems = certificate_problems(cert, col, AB)
    if problems:
        raise CertificateError(problems)
    return cert


def theorem1_step(AB: Configuration, col: Mapping[int, int], copies: Sequence[Sequence[Hashable]],
                  sides2_A: Sequence[Rational], a2_k: Rational) -> Certificate | None:
    """One induction step: chi-colour B, then look for a monochromatic a_k pair
    inside a chi-class under the colouring shared by every copy of R*.

    Returns None when no chi-class contains such a pair (the full argument would
    then produce a rainbow R via the C(a_k) property).
    """
    A, B = AB.factors
    keyed = {k: col[i] for k, i in AB.phi.items()}
    b_keys = B.keys()
    chi = build_aux_colouring(keyed, copies, b_keys)
    a2_k = Fraction(a2_k)
    for idx, cp in enumerate(copies):
        cls = [x for x in b_keys if chi[x] == idx]
        shared = {x: keyed[(cp[0], x)] for x in cls}
        for x1, x2 in itertools.combinations(cls, 2):
            if shared[x1] == shared[x2] and B.sq_dist(B.phi[x1], B.phi[x2]) == a2_k:
                return promote_mono_box(AB, col, cp, (x1, x2), list(sides2_A) + [a2_k])
    return None
