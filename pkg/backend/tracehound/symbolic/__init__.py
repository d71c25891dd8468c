"""
Symbolic values, path states and exploration results.

The engine itself lives in `tracehound.symbolic.engine`; it is not imported
here because it depends on `tracehound.properties`, which depends on these
types.
"""

from tracehound.symbolic.candidate import Candidate, EtherAcceptance, ExplorationResult, ExplorationStats
from tracehound.symbolic.expr import (
    MAX_WORD,
    ONE,
    ZERO,
    Const,
    Hash,
    Op,
    SymValue,
    Var,
    VarOrigin,
    const,
    evaluate,
    is_concrete,
    mk,
    mk_hash,
    var,
)
from tracehound.symbolic.memory import SymMemory
from tracehound.symbolic.state import PendingViolation, SymLabel, SymState

__all__ = [
    "Candidate",
    "EtherAcceptance",
    "ExplorationResult",
    "ExplorationStats",
    "MAX_WORD",
    "ONE",
    "ZERO",
    "Const",
    "Hash",
    "Op",
    "SymValue",
    "Var",
    "VarOrigin",
    "const",
    "evaluate",
    "is_concrete",
    "mk",
    "mk_hash",
    "var",
    "SymMemory",
    "PendingViolation",
    "SymLabel",
    "SymState",
]
