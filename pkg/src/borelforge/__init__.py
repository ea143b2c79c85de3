"""Exact construction of a Borel linear subspace of R^omega that is not
covered by countably many closed Haar-meager sets, at finite scale."""

from .exact_arith import BudgetExceeded, TowerForm, tf_abs_ge, tf_add, tf_scale, tf_sign
from .hull import HullCode, hull_distinguish, hull_encode, lex_compare
from .thick_family import (
    Thresholds,
    canonical_element,
    marker,
    node_family_index,
    thick_member,
    trimmed_member,
    xi,
)
from .tree import Branch, ball, child, disjointness_certificate, eval_coordinate, root
from .verifier import claim2_check, lemma1_check, lemma1_fuzz, r_and_l, verify_tree

__version__ = "0.1.0"
