"""Adversarial colouring generators, brute-force oracles and mutation testing.

Every random routine takes an explicit seed and uses ``random.Random(seed)``
(Mersenne Twister), so a trial is reproducible from (seed, parameters).
"""
from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .colouring import (Certificate, Colouring, GuardExceeded, Target,
                        certificate_problems, find_mono_pairs_at, is_mono, is_rainbow)
from .exact import RadicalScalar, Rational
from .geometry import Configuration, iter_pairs_at, product, regular_simplex
from .trees import TreeShape, product_vertices


# -- generators -------------------------------------------------------------

def gen_sibling_proper(shapes: Sequence[TreeShape], palette: int, seed: int) -> Colouring:
    """Random colouring of a tree product with no equal-coloured siblings in any copy.

    colour(v) = pi(g(P) + sum_j sigma_{j,P}(c_j)) mod palette, where P is the
    tuple of parents of v's coordinates, c_j the child index of coordinate j,
    sigma_{j,P} a random injection into Z_palette and pi a random permutation.
    Siblings in factor i share P and every c_j with j != i, so only the
    injective term sigma_{i,P} separates them.
    """
    need = max((t.max_arity() for t in shapes), default=0)
    if palette < max(need, 1):
        raise ValueError(f"palette {palette} is smaller than the largest arity {need}")
    rng = random.Random(seed)
    perm = list(range(palette))
    rng.shuffle(perm)
    offsets: dict[tuple, int] = {}
    injections: dict[tuple, list[int]] = {}
    out = {}
    for v in product_vertices(shapes):
        parents = tuple(u[:-1] if u else None for u in v)
        if parents not in offsets:
            offsets[parents] = rng.randrange(palette)
        total = offsets[parents]
        for j, u in enumerate(v):
            if not u:
                continue
            key = (j, parents)
            if key not in injections:
                injections[key] = rng.sample(range(palette), shapes[j].num_children(u[:-1]))
            total += injections[key][u[-1]]
        out[v] = perm[total % palette]
    return Colouring(out)


def gen_no_mono_pair(c: Configuration, d2: Rational, seed: int, extra: int = 1) -> Colouring:
    """Greedy proper colouring of the exact-distance-d graph in random order.

    Each point draws uniformly from the colours of ``range(max_degree + 1 +
    extra)`` not used by an already-coloured neighbour.
    """
    rng = random.Random(seed)
    nbrs: dict[int, list[int]] = {i: [] for i in range(len(c))}
    for i, j in iter_pairs_at(c, d2):
        nbrs[i].append(j)
        nbrs[j].append(i)
    palette = max((len(v) for v in nbrs.values()), default=0) + 1 + extra
    order = list(range(len(c)))
    rng.shuffle(order)
    col: dict[int, int] = {}
    for i in order:
        taken = {col[j] for j in nbrs[i] if j in col}
        col[i] = rng.choice([x for x in range(palette) if x not in taken])
    out = Colouring(col)
    if find_mono_pairs_at(c, out, d2):
        raise AssertionError("greedy colouring left a monochromatic pair")
    return out


def random_colouring(n: int, palette: int, seed: int) -> Colouring:
    rng = random.Random(seed)
    return Colouring([rng.randrange(palette) for _ in range(n)])


def random_tree(rng: random.Random, max_nodes: int = 60) -> TreeShape:
    n = rng.randint(1, max_nodes)
    return TreeShape.from_parents([-1] + [rng.randrange(v) for v in range(1, n)])


def random_side_pair(rng: random.Random) -> tuple[Fraction, Fraction]:
    """Random rationals 0 < a^2 <= b^2 (a^2 == b^2 about one time in eight)."""
    a2 = Fraction(rng.randint(1, 60), rng.randint(1, 12))
    gap = Fraction(0) if rng.random() < 0.125 else Fraction(rng.randint(1, 60), rng.randint(1, 12))
    return a2, a2 + gap


def random_grid_colouring(sizes: Sequence[int], seed: int, spare: int = 3) -> dict[tuple, int]:
    """Colouring of a grid in which cells differing in one coordinate always differ.

    Cells are coloured in random order, each drawing from the colours not used
    on its axis-parallel lines; the palette leaves ``spare`` colours of slack.
    """
    rng = random.Random(seed)
    cells = list(itertools.product(*(range(k) for k in sizes)))
    rng.shuffle(cells)
    palette = sum(k - 1 for k in sizes) + 1 + spare
    col: dict[tuple, int] = {}
    for cell in cells:
        taken = set()
        for i, k in enumerate(sizes):
            for y in range(k):
                other = cell[:i] + (y,) + cell[i + 1:]
                if other in col:
                    taken.add(col[other])
        col[cell] = rng.choice([x for x in range(palette) if x not in taken])
    return col


# -- oracles ----------------------------------------------------------------

def set_partitions(n: int, max_blocks: int | None = None) -> Iterator[list[int]]:
    """Restricted growth strings: a[0] = 0, a[i] <= max(a[:i]) + 1."""
    if n == 0:
        yield []
        return
    limit = n if max_blocks is None else max_blocks
    a = [0] * n

    def rec(i: int, top: int) -> Iterator[list[int]]:
        if i == n:
            yield a
            return
        for x in range(min(top + 2, limit)):
            a[i] = x
            yield from rec(i + 1, max(top, x))

    yield from rec(1, 0)


def oracle_exhaustive_mr(S: Configuration, mono: Target, rainbow: Target,
                         max_points: int = 10) -> bool:
    """S ->MR (mono, rainbow), by enumerating every set partition of S."""
    if len(S) > max_points:
        raise GuardExceeded(f"{len(S)} points exceeds the oracle limit {max_points}")
    mono_copies = mono.copies(S)
    rainbow_copies = rainbow.copies(S)
    for blocks in set_partitions(len(S)):
        if any(is_mono(blocks, cp) for cp in mono_copies):
            continue
        if any(is_rainbow(blocks, cp) for cp in rainbow_copies):
            continue
        return False
    return True


def oracle_exhaustive_arrow(S: Configuration, r: int, target: Target,
                            max_points: int = 10) -> bool:
    """S ->^r target, by enumerating every partition of S into at most r blocks."""
    if len(S) > max_points:
        raise GuardExceeded(f"{len(S)} points exceeds the oracle limit {max_points}")
    copies = target.copies(S)
    return all(any(is_mono(blocks, cp) for cp in copies)
               for blocks in set_partitions(len(S), r))


# -- product-step surrogate family -----------------------------------------

@dataclass
class SurrogateInstance:
    seed: int
    AB: Configuration
    colouring: Colouring
    copies: list[tuple[int, int]]
    sides2_A: list[Fraction]
    a2_k: Fraction


def surrogate_instance(seed: int) -> SurrogateInstance:
    """A x B with A a simplex listing 2-4 of its a_1-pairs, B a simplex of m*q+1 points.

    Every slice A x {x} makes one listed copy monochromatic in one of q
    colours and gives all other points unique colours, so chi takes at most m
    values and pigeonhole forces two points of B to agree on (chi, colour).
    """
    rng = random.Random(seed)
    a1, a2 = (Fraction(rng.randint(1, 30), rng.randint(1, 6)) for _ in range(2))
    size_A = rng.randint(3, 4)
    all_pairs = list(itertools.combinations(range(size_A), 2))
    m = rng.randint(2, min(4, len(all_pairs)))
    copies = rng.sample(all_pairs, m)
    q = rng.randint(2, 3)
    A = regular_simplex(size_A, a1)
    B = regular_simplex(m * q + 1, a2)
    AB = product([A, B])
    fresh = itertools.count(q)
    col = {}
    for x in range(len(B)):
        chosen = copies[rng.randrange(m)]
        shade = rng.randrange(q)
        for a in range(size_A):
            col[AB.phi[(a, x)]] = shade if a in chosen else next(fresh)
    return SurrogateInstance(seed, AB, Colouring(col), copies, [a1], a2)


# -- mutation testing -------------------------------------------------------

@dataclass
class MutationReport:
    checked: int = 0
    originals_rejected: list[int] = field(default_factory=list)
    mutants: int = 0
    accepted_mutants: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.originals_rejected and not self.accepted_mutants


def _displaced(c: Configuration, point: int) -> Configuration:
    pts = list(c.points)
    moved = dict(pts[point])
    moved[c.dimension] = RadicalScalar.rational(1)
    pts[point] = moved
    return Configuration(pts, c.phi, c.dimension + 1, c.params)


def mutants(cert: Certificate, col: Colouring, config: Configuration | None,
            rng: random.Random) -> Iterator[tuple[str, Colouring, Configuration | None]]:
    """Recolour one certificate point so the colour pattern breaks, and (for
    geometric kinds) move one point a unit step off along a new axis."""
    pts = list(cert.points)
    target = pts[rng.randrange(len(pts))]
    if cert.kind.startswith("mono"):
        new = max(col.values()) + 1
    else:
        new = col[rng.choice([p for p in pts if p != target])]
    yield "recolour", col.recoloured(target, new), config
    if config is not None and cert.kind != "rainbow-box":
        yield "displace", col, _displaced(config, target)


def mutation_suite(stream: Iterator[tuple[Certificate, Colouring, Configuration | None]],
                   seed: int = 0) -> MutationReport:
    rng = random.Random(seed)
    report = MutationReport()
    for idx, (cert, col, config) in enumerate(stream):
        report.checked += 1
        if certificate_problems(cert, col, config):
            report.originals_rejected.append(idx)
            continue
        for kind, mcol, mconfig in mutants(cert, col, config, rng):
            report.mutants += 1
            if not certificate_problems(cert, mcol, mconfig):
                report.accepted_mutants.append({"certificate": idx, "mutation": kind})
    return report


# -- trial driver -----------------------------------------------------------

def _lemma2_trial(args: tuple[int, dict]) -> dict:
    from .extraction import build_C, lemma2_pipeline
    from .serialize import certificate_to_json, num
    seed, params = args
    C = build_C(params["a2"], params["b2"])
    if params.get("mode", "no-mono") == "no-mono":
        col = gen_no_mono_pair(C, params["a2"], seed)
    else:
        col = random_colouring(len(C), params.get("palette", 4), seed)
    cert = lemma2_pipeline(C, col)
    return {"seed": seed, "params": num(params), "outcome": cert.kind,
            "certificate": certificate_to_json(cert)}


def _lemma3_trial(args: tuple[int, dict]) -> dict:
    from .colouring import all_copies_proper
    from .extraction import refine_proper_trees
    seed, params = args
    shapes = [TreeShape.complete(n, params["h"]) for n in params["n"]]
    palette = params.get("palette") or max(params["n"]) + seed % 8
    col = gen_sibling_proper(shapes, palette, seed)
    res = refine_proper_trees(shapes, col, params["nprime"])
    ok = all_copies_proper(res.subtrees, col)
    return {"seed": seed, "params": dict(params, palette=palette),
            "outcome": "proper" if ok else "IMPROPER", "log": res.log}


def _lemma4_trial(args: tuple[int, dict]) -> dict:
    from .extraction import extract_rainbow_box
    from .serialize import certificate_to_json
    seed, params = args
    sizes = params["sizes"]
    col = random_grid_colouring(sizes, seed)
    chosen, cert = extract_rainbow_box([list(range(k)) for k in sizes], col, params["mprime"])
    return {"seed": seed, "params": params, "outcome": cert.kind,
            "certificate": certificate_to_json(cert)}


TRIALS: dict[str, Callable[[tuple[int, dict]], dict]] = {
    "lemma2": _lemma2_trial,
    "lemma3": _lemma3_trial,
    "lemma4": _lemma4_trial,
}


def run_trials(kind: str, params: dict, seeds: Sequence[int], jobs: int = 1) -> list[dict]:
    """Run independent trials; reports come back in seed order whatever ``jobs`` is."""
    fn = TRIALS[kind]
    work = [(s, params) for s in seeds]
    if jobs <= 1:
        return [fn(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, work, chunksize=max(1, len(work) // (4 * jobs))))

