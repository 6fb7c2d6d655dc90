import itertools
import random
from fractions import Fraction

import pytest

from cuboidramsey.colouring import (Certificate, Colouring, Target, arrow_check,
                                    find_mono_pairs_at, is_sibling_proper)
from cuboidramsey.exact import radical_sqrt
from cuboidramsey.extraction import lemma2_pipeline, build_C, theorem1_step
from cuboidramsey.geometry import build_tree_simplex, from_points, regular_simplex
from cuboidramsey.harness import (gen_no_mono_pair, gen_sibling_proper, mutation_suite,
                                  oracle_exhaustive_arrow, oracle_exhaustive_mr,
                                  random_grid_colouring, random_tree, run_trials,
                                  set_partitions, surrogate_instance)
from cuboidramsey.trees import TreeShape, product_size


def bell_numbers(k):
    """Bell triangle, independent of the enumerator."""
    row, out = [1], [1]
    for _ in range(k):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        out.append(nxt[0])
        row = nxt
    return out


def stirling2(n, k):
    if n == k:
        return 1
    if n == 0 or k == 0:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def test_partition_counts_are_bell_numbers():
    bell = bell_numbers(9)
    for n in range(10):
        assert sum(1 for _ in set_partitions(n)) == bell[n]


@pytest.mark.parametrize("n, r", [(5, 2), (6, 3), (7, 1), (4, 4)])
def test_bounded_partitions(n, r):
    assert sum(1 for _ in set_partitions(n, r)) == sum(stirling2(n, k) for k in range(1, r + 1))


def test_partitions_are_distinct_growth_strings():
    seen = {tuple(p) for p in set_partitions(6)}
    assert len(seen) == bell_numbers(6)[6]
    for p in seen:
        assert p[0] == 0
        assert all(p[i] <= max(p[:i]) + 1 for i in range(1, len(p)))


@pytest.mark.parametrize("seed", range(10))
def test_gen_sibling_proper_at_max_arity(seed):
    shapes = [TreeShape.complete(4, 2), TreeShape.complete(3, 2)]
    col = gen_sibling_proper(shapes, 4, seed)
    assert len(col) == product_size(shapes)
    assert is_sibling_proper(shapes, col)
    assert col.num_colours() <= 4


def test_gen_sibling_proper_large_palette():
    shapes = [TreeShape.complete(2, 2)]
    col = gen_sibling_proper(shapes, 7, 3)
    assert is_sibling_proper(shapes, col)
    with pytest.raises(ValueError):
        gen_sibling_proper(shapes, 1, 0)


def test_gen_no_mono_pair_examples():
    lone = from_points([[0], [1]])
    col = gen_no_mono_pair(lone, 5, 0)
    assert find_mono_pairs_at(lone, col, 5) == []
    s = regular_simplex(6, 2)
    col = gen_no_mono_pair(s, 2, 1)
    assert col.num_colours() == 6
    D = build_tree_simplex(TreeShape.complete(3, 2), 1, 4)
    for seed in range(100):
        assert find_mono_pairs_at(D, gen_no_mono_pair(D, 1, seed), 1) == []


def test_random_grid_colouring_lines_rainbow():
    col = random_grid_colouring([3, 5], 2)
    for x in range(3):
        assert len({col[(x, y)] for y in range(5)}) == 5
    for y in range(5):
        assert len({col[(x, y)] for x in range(3)}) == 3


def test_random_tree_size_bound():
    rng = random.Random(0)
    assert all(random_tree(rng).size() <= 60 for _ in range(50))


def test_oracle_mr_examples():
    pair = regular_simplex(2, 1)
    assert oracle_exhaustive_mr(pair, Target.pair(1), Target.pair(1))
    far = from_points([[0], [radical_sqrt(2)], [radical_sqrt(8)]])
    assert not oracle_exhaustive_mr(far, Target.pair(1), Target.simplex(4, 1))
    tetra = regular_simplex(4, 1)
    assert oracle_exhaustive_mr(tetra, Target.pair(1), Target.simplex(4, 1))
    # a triangle under 3 colours is always mono-pair or rainbow, but not with a 4-point rainbow target
    assert not oracle_exhaustive_mr(regular_simplex(3, 1), Target.pair(1), Target.simplex(4, 1))


@pytest.mark.parametrize("m", [2, 3, 4])
def test_oracles_agree_on_pigeonhole(m):
    for k, expect in ((m + 1, True), (m, False)):
        s = regular_simplex(k, 1)
        assert oracle_exhaustive_arrow(s, m, Target.pair(1)) is expect
        assert arrow_check(s, m, Target.pair(1)) is expect


def test_oracles_agree_on_random_small_sets():
    rng = random.Random(5)
    for _ in range(20):
        D = build_tree_simplex(random_tree(rng, 7), 1, 2)
        for r in (1, 2, 3):
            for tgt in (Target.pair(1), Target.pair(2)):
                assert arrow_check(D, r, tgt) == oracle_exhaustive_arrow(D, r, tgt)


def test_mutation_suite_rejects_everything():
    C = build_C(1, [4])
    stream = []
    for seed in range(10):
        col = gen_no_mono_pair(C, 1, seed)
        stream.append((lemma2_pipeline(C, col), col, C))
    stream.append((lemma2_pipeline(C, Colouring([0] * 13)), Colouring([0] * 13), C))
    inst = surrogate_instance(3)
    stream.append((theorem1_step(inst.AB, inst.colouring, inst.copies, inst.sides2_A, inst.a2_k),
                   inst.colouring, inst.AB))
    rep = mutation_suite(iter(stream), seed=1)
    assert rep.checked == 12
    assert rep.mutants == 24
    assert rep.ok


def test_mutation_suite_flags_broken_original():
    box = from_points([[0], [1]])
    cert = Certificate("mono-pair", (0, 1), {"d2": 1})
    rep = mutation_suite(iter([(cert, Colouring([0, 1]), box)]))
    assert rep.originals_rejected == [0]
    assert not rep.ok


def test_run_trials_deterministic_and_parallel():
    seeds = range(6)
    serial = run_trials("lemma3", {"h": 2, "n": [7, 3], "nprime": [1, 1]}, seeds)
    parallel = run_trials("lemma3", {"h": 2, "n": [7, 3], "nprime": [1, 1]}, seeds, jobs=2)
    assert serial == parallel
    assert [r["seed"] for r in serial] == list(seeds)
    assert all(r["outcome"] == "proper" for r in serial)


def test_surrogate_instances_are_deterministic():
    a, b = surrogate_instance(9), surrogate_instance(9)
    assert dict(a.colouring) == dict(b.colouring) and a.copies == b.copies
    assert 2 <= len(a.copies) <= 4
