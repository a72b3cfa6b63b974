"""Exact-arithmetic toolkit for move equivalence of finite directed graphs
and the K-theoretic invariants of their graph algebras."""

from .graphs import (Graph, b_bullet, b_matrix, canonical_form, condition_H, condition_K,
                     condition_L, is_isomorphic, reachability, return_path_class)
from .intlinalg import (AbelianGroupInvariants, BlockStructure, IntMatrix, cokernel,
                        hermite_normal_form, iota_r, kernel_rank, kweb_invariants,
                        smith_normal_form, solve_integer)
from .structure import (ComponentPoset, KTempered, TemperedPoset, gamma, hasse,
                        k_temperature, temperature, tempered_isos)
from .moves import (MoveSpec, StandardFormPair, apply, apply_all, legal_col_add,
                    legal_row_add, plug, standard_form_pair, unplug)
from .equivalence import (Verdict, bowen_franks, decide, decide_glp_signed,
                          decide_irreducible, decide_slp_unit, elementary_equivalent,
                          outer_equivalent)
from .atlas import full_classification, partition_inner, partition_outer
from .lens import LensParams, check_path_lemma, covering, lens_adjacency, lens_iso, skeleton

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
