import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cuboidramsey.colouring import Colouring, all_copies_proper, verify_certificate
from cuboidramsey.extraction import (CertificateError, NoMonochromaticCopy, PreconditionError,
                                     Starvation, build_aux_colouring, build_C,
                                     count_pairs_in_C, count_structured_box_copies,
                                     extract_rainbow_box, lemma2_pipeline, lemma3_params,
                                     lemma3_params_sound, lemma4_params, plan_C,
                                     promote_mono_box, refine_proper_trees, theorem1_params,
                                     theorem1_step)
from cuboidramsey.geometry import (BudgetExceeded, build_tree_simplex, cuboid_distance_profile,
                                   from_points, product, regular_simplex)
from cuboidramsey.harness import gen_sibling_proper, random_grid_colouring, surrogate_instance
from cuboidramsey.exact import radical_sqrt
from cuboidramsey.trees import TreeShape, complete_size, product_vertices


def choose(n, k):
    return math.factorial(n) // (math.factorial(k) * math.factorial(n - k))


# -- calculators -------------------------------------------------------------

@pytest.mark.parametrize("h, nprime, n", [(2, [1], [3]), (2, [1, 1], [7, 3]), (8, [1, 1], [73, 9])])
def test_lemma3_table(h, nprime, n):
    assert lemma3_params(h, nprime) == n


@pytest.mark.parametrize("mprime, m", [([2], [2]), ([2, 2], [2, 8]), ([2, 2, 2], [2, 8, 896])])
def test_lemma4_table(mprime, m):
    assert lemma4_params(mprime) == m


@given(st.integers(1, 9), st.lists(st.integers(1, 4), min_size=1, max_size=4))
def test_lemma3_inequality_recheck(h, nprime):
    n = lemma3_params(h, nprime)
    for i in range(len(n)):
        rhs = nprime[i] + h * math.prod(nprime[:i]) * math.prod(n[i + 1:])
        assert n[i] >= rhs
    sound = lemma3_params_sound(h, nprime)
    assert all(x >= y for x, y in zip(sound, n))


@given(st.lists(st.integers(1, 3), min_size=1, max_size=3))
def test_lemma4_inequality_recheck(mprime):
    m = lemma4_params(mprime)
    assert m[0] == mprime[0]
    for s in range(1, len(m)):
        rhs = 1
        for j in range(s):
            rhs *= choose(m[j], mprime[j])
        rhs *= math.prod(mprime[:s]) ** 2 * mprime[s]
        assert m[s] >= rhs
    assert all(x >= y for x, y in zip(m, mprime))


def test_calculators_monotone():
    assert lemma3_params(3, [1, 1]) >= lemma3_params(2, [1, 1])
    assert lemma4_params([2, 3]) >= lemma4_params([2, 2])


def test_calculators_reject_bad_input():
    for bad in ([], [0, 1]):
        with pytest.raises(ValueError):
            lemma3_params(2, bad)
        with pytest.raises(ValueError):
            lemma4_params(bad)
    with pytest.raises(ValueError):
        lemma3_params(0, [1])


def test_sound_bound_at_h2():
    # a kept unary subtree of height 2 has 3 vertices: n_2 = 1 + 2*3,
    # and the 7-ary tree of height 2 has 57: n_1 = 1 + 2*57
    assert lemma3_params_sound(2, [1, 1]) == [115, 7]
    assert lemma3_params_sound(3, [2]) == lemma3_params(3, [2]) == [5]


# -- refinement ----------------------------------------------------------------

def test_refine_star_hand_trace():
    t = TreeShape.complete(3, 1)
    red, blue, green = 0, 1, 2
    col = {((),): red, ((0,),): blue, ((1,),): green, ((2,),): red}
    res = refine_proper_trees([t], col, [1])
    assert res.subtrees[0].branch() == [(), (0,)]
    assert res.log[0]["bad"] == 1
    col2 = dict(col)
    col2[((0,),)] = red
    assert refine_proper_trees([t], col2, [1]).subtrees[0].branch() == [(), (1,)]


def test_refine_injective_keeps_first_children():
    shapes = [TreeShape.complete(3, 2), TreeShape.complete(2, 2)]
    col = {v: i for i, v in enumerate(product_vertices(shapes))}
    res = refine_proper_trees(shapes, col, [2, 1])
    assert res.subtrees[0].children(()) == ((0,), (1,))
    assert res.subtrees[1].branch() == [(), (0,), (0, 0)]
    assert all(e["method"] == "greedy" for e in res.log)


def test_refine_starves_without_good_children():
    t = TreeShape.complete(2, 1)
    col = {((),): 0, ((0,),): 0, ((1,),): 0}
    with pytest.raises(Starvation):
        refine_proper_trees([t], col, [1])


@given(st.integers(2, 5), st.integers(1, 3), st.integers(0, 10**6))
def test_sound_bound_greedy_never_starves_at_h1(nprime, h, seed):
    # one factor: both chains agree, and the greedy route must succeed
    n = lemma3_params_sound(h, [nprime])[0]
    shapes = [TreeShape.complete(n, h)]
    col = gen_sibling_proper(shapes, n + seed % 3, seed)
    res = refine_proper_trees(shapes, col, [nprime], search_limit=0)
    assert res.subtrees[0].is_complete(nprime, h)
    assert all_copies_proper(res.subtrees, col)


@pytest.mark.parametrize("seed", range(20))
def test_sound_bound_two_factors_greedy(seed):
    n = lemma3_params_sound(1, [1, 1])
    shapes = [TreeShape.complete(k, 1) for k in n]
    col = gen_sibling_proper(shapes, max(n), seed)
    res = refine_proper_trees(shapes, col, [1, 1], search_limit=0)
    assert all_copies_proper(res.subtrees, col)


@pytest.mark.parametrize("seed", range(20))
def test_desk_scale_refine(seed):
    shapes = [TreeShape.complete(7, 2), TreeShape.complete(3, 2)]
    col = gen_sibling_proper(shapes, 7 + seed % 8, seed)
    res = refine_proper_trees(shapes, col, [1, 1])
    assert all(s.is_complete(1, 2) for s in res.subtrees)
    assert all_copies_proper(res.subtrees, col)


# -- rainbow boxes -------------------------------------------------------------

def test_rainbow_box_injective():
    col = {(x, y): 8 * x + y for x in range(2) for y in range(8)}
    chosen, cert = extract_rainbow_box([range(2), range(8)], col, [2, 2])
    assert chosen == [[0, 1], [0, 1]]
    assert verify_certificate(cert, col)


def test_rainbow_box_sum_colouring():
    col = {(x, y): x + y for x in range(2) for y in range(8)}
    chosen, cert = extract_rainbow_box([list(range(2)), list(range(8))], col, [2, 2])
    assert chosen == [[0, 1], [0, 2]]
    assert sorted(col[c] for c in cert.points) == [0, 1, 2, 3]


def test_rainbow_box_preconditions():
    with pytest.raises(PreconditionError):
        extract_rainbow_box([range(2), range(7)], {}, [2, 2])
    col = {(x, y): x for x in range(2) for y in range(8)}
    with pytest.raises(PreconditionError):
        extract_rainbow_box([range(2), range(8)], col, [2, 2])


@pytest.mark.parametrize("seed", range(30))
def test_rainbow_box_three_dims(seed):
    sizes = lemma4_params([1, 2, 2])
    col = random_grid_colouring(sizes, seed)
    chosen, cert = extract_rainbow_box([range(k) for k in sizes], col, [1, 2, 2])
    assert [len(s) for s in chosen] == [1, 2, 2]
    assert verify_certificate(cert, col)


# -- C(a) and the pair-or-rainbow pipeline -------------------------------------

def test_build_C_small():
    for a2 in (1, 4):
        c = build_C(a2, [4])
        assert len(c) == 13
        assert c.params["m"] == [2] and c.params["h"] == 2 and c.params["n"] == [3]


def test_build_C_refuses_at_s2():
    plan = plan_C(1, [1, 4])
    assert plan.h == 8 and plan.n == (73, 9)
    expected = complete_size(73, 8) * complete_size(9, 8)
    assert plan.total == expected
    with pytest.raises(BudgetExceeded) as info:
        build_C(1, [1, 4])
    assert info.value.estimate == expected > 10**14


def test_build_C_rejects_large_a():
    with pytest.raises(ValueError):
        build_C(5, [4])


def test_pipeline_constant_and_injective():
    C = build_C(1, [4])
    mono = lemma2_pipeline(C, Colouring([0] * 13))
    assert mono.kind == "mono-pair"
    rb = lemma2_pipeline(C, Colouring(list(range(13))))
    assert rb.kind == "rainbow-cuboid"
    assert cuboid_distance_profile([C.points[i] for i in rb.points], [4])


def test_pipeline_rejects_partial_colouring():
    with pytest.raises(PreconditionError):
        lemma2_pipeline(build_C(1, [4]), Colouring({0: 1}))


def test_pipeline_accepts_tree_simplex():
    D = build_tree_simplex(TreeShape.complete(3, 2), 1, 4)
    assert lemma2_pipeline(D, list(range(13))).kind == "rainbow-cuboid"


def test_count_pairs_in_C_matches_scan():
    C = build_C(1, [4])
    plan = plan_C(1, [4])
    for d2 in (1, 4):
        scan = sum(1 for i, j in itertools.combinations(range(13), 2) if C.sq_dist(i, j) == d2)
        assert count_pairs_in_C(plan, d2) == scan
    assert count_pairs_in_C(plan) == 12


# -- structured copies and the product step ----------------------------------

def test_count_structured_box_copies():
    assert count_structured_box_copies([regular_simplex(13, 2)], [2]) == 78
    assert count_structured_box_copies([78, 5], [1, 1]) == 390
    D = build_tree_simplex(TreeShape.complete(3, 2), 1, 4)
    f = D.float_points()
    brute = sum(1 for i, j in itertools.combinations(range(13), 2)
                if abs(((f[i] - f[j]) ** 2).sum() - 1) < 1e-9)
    assert count_structured_box_copies([D], [1]) == brute == 12


def test_theorem1_params():
    out = theorem1_params([1, 4])
    assert out["t"] == [1, 4] and out["a2"] == [1] * 5
    assert out["pair_counts"][0] == count_pairs_in_C(plan_C(1, [1, 4]))
    assert out["m_from_2"] == [out["pair_counts"][0]]


def test_aux_colouring_examples():
    col = {(a, x): 3 for a in (0, 1) for x in (0, 1)}
    chi = build_aux_colouring(col, [(0, 1)], [0, 1])
    assert set(chi.values()) == {0}
    col2 = {}
    for x in range(4):
        mono = (0, 1) if x % 2 == 0 else (1, 2)
        for a in range(3):
            col2[(a, x)] = 0 if a in mono else 10 + 3 * x + a
    chi2 = build_aux_colouring(col2, [(0, 1), (1, 2)], range(4))
    assert [chi2[x] for x in range(4)] == [0, 1, 0, 1]
    with pytest.raises(NoMonochromaticCopy):
        build_aux_colouring({(a, 0): a for a in range(2)}, [(0, 1)], [0])


def test_promote_single_pairs():
    A = from_points([[0], [radical_sqrt(2)]])
    B = from_points([[0], [radical_sqrt(3)]])
    AB = product([A, B])
    col = Colouring([7] * 4)
    cert = promote_mono_box(AB, col, [0, 1], (0, 1), [2, 3])
    assert cert.kind == "mono-box"
    with pytest.raises(CertificateError):
        promote_mono_box(AB, col.recoloured(AB.phi[(1, 1)], 8), [0, 1], (0, 1), [2, 3])


@pytest.mark.parametrize("seed", range(10))
def test_surrogate_step(seed):
    inst = surrogate_instance(seed)
    cert = theorem1_step(inst.AB, inst.colouring, inst.copies, inst.sides2_A, inst.a2_k)
    assert cert is not None and cert.kind == "mono-box"
    assert verify_certificate(cert, inst.colouring, inst.AB)
