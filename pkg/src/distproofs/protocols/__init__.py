"""Concrete verifier/prover pairs."""

from .amos import amos_private, amos_shared, coin_bits, degree_bound
from .spanning_tree import canonical_tree, implicit_parent, spanning_tree_pls
from .tce import honest_coloring, tce_private, tce_shared

__all__ = [
    "amos_private", "amos_shared", "coin_bits", "degree_bound", "canonical_tree",
    "implicit_parent", "spanning_tree_pls", "honest_coloring", "tce_private", "tce_shared",
]
