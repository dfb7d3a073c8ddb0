"""Automorphism groups of regular rooted trees.

Finite presentations (schemes) of countable rooted trees, their canonical
forms and algebraic closures, decisions for strong cofinality, ample
generics and the small index property, and a brute-force oracle on finite
truncations.
"""

__version__ = "0.1.0"

from .errors import (
    Incompatible,
    InvariantViolation,
    NoWitness,
    NotApplicable,
    ParseError,
    ResourceLimitExceeded,
    TreeAutError,
    ValidationError,
)
from .extnat import OMEGA, ExtNat
from .scheme import Address, Entry, Scheme, load_scheme, parse_scheme, serialize
from .finite_tree import FiniteTree, parse_finite_tree, unfold
from .canon import canonical_form, isomorphic, quotient_report
from .acl import acl_enumerate, acl_membership, orbit_cardinality, s_set, universal_acl_finite
from .verdict import (
    Mode,
    Property,
    decide_ample_generics,
    decide_small_index,
    decide_strong_cofinality,
    full_report,
    witness_countable_cofinality,
)
from .nonrooted import EdgeIndexedGraph, decide_rigidity_conditions, parse_edge_indexed, root_at

__all__ = [
    "__version__",
    "TreeAutError",
    "ParseError",
    "ValidationError",
    "ResourceLimitExceeded",
    "InvariantViolation",
    "NotApplicable",
    "NoWitness",
    "Incompatible",
    "ExtNat",
    "OMEGA",
    "Address",
    "Entry",
    "Scheme",
    "parse_scheme",
    "serialize",
    "load_scheme",
    "FiniteTree",
    "parse_finite_tree",
    "unfold",
    "canonical_form",
    "isomorphic",
    "quotient_report",
    "orbit_cardinality",
    "acl_membership",
    "acl_enumerate",
    "s_set",
    "universal_acl_finite",
    "Mode",
    "Property",
    "decide_strong_cofinality",
    "decide_ample_generics",
    "decide_small_index",
    "witness_countable_cofinality",
    "full_report",
    "EdgeIndexedGraph",
    "parse_edge_indexed",
    "root_at",
    "decide_rigidity_conditions",
]
