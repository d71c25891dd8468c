"""Leaky and locking trace properties and their three instantiations."""

from tracehound.properties.predicates import (
    GreedyCategory,
    Mode,
    SymbolicContext,
    TracePredicateSet,
    check_leaky,
    check_locking,
    greedy_classify,
    greedy_predicates,
    posthumous,
    predicates_for,
    prodigal_predicates,
    suicidal_predicates,
)
from tracehound.properties.greedy import accepts_ether, classify

__all__ = [
    "GreedyCategory",
    "Mode",
    "SymbolicContext",
    "TracePredicateSet",
    "check_leaky",
    "check_locking",
    "greedy_classify",
    "greedy_predicates",
    "posthumous",
    "predicates_for",
    "prodigal_predicates",
    "suicidal_predicates",
    "accepts_ether",
    "classify",
]
