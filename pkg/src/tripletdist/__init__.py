"""
Rooted triplet distance between two leaf-labelled trees in O(n log n) time.

>>> from tripletdist import parse_newick, triplet_distance
>>> triplet_distance(parse_newick("((1,2),(3,4));"), parse_newick("((1,3),(2,4));"))
4
"""

from .distance import InvariantError, compute, shared_triplets, triplet_distance
from .newick import (
    LabelError,
    NewickError,
    Tree,
    canonical_form,
    isomorphic,
    parse_newick,
    read_newick,
    validate_pair,
    write_newick,
)
from .treegen import gen_alpha, gen_random, shuffle_labels

__all__ = [
    "Tree",
    "NewickError",
    "LabelError",
    "InvariantError",
    "parse_newick",
    "read_newick",
    "write_newick",
    "validate_pair",
    "canonical_form",
    "isomorphic",
    "shared_triplets",
    "triplet_distance",
    "compute",
    "gen_random",
    "gen_alpha",
    "shuffle_labels",
]

__version__ = "0.1.0"
