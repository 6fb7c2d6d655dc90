"""Constructive canonical Ramsey toolkit for cuboids.

Exact tree-simplex configurations, the extraction algorithms that turn a
colouring into a monochromatic or rainbow certificate, and brute-force
oracles for small instances.
"""
from .colouring import (Certificate, Colouring, Target, arrow_check,
                        find_mono_pairs_at, is_proper_tree_colouring,
                        is_sibling_proper, verify_certificate)
from .exact import RadicalScalar, radical_sqrt, sq_norm_diff
from .extraction import (build_aux_colouring, build_C, count_structured_box_copies,
                         extract_rainbow_box, lemma2_pipeline, lemma3_params,
                         lemma3_params_sound, lemma4_params, promote_mono_box,
                         refine_proper_trees, theorem1_params)
from .geometry import (BudgetExceeded, Configuration, build_tree_simplex,
                       cuboid_distance_profile, decompose_cuboid, product,
                       verify_distance_invariants)
from .trees import TreeShape, enumerate_copies_of_factor, relation

__version__ = "0.1.0"
