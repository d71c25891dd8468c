"""SMT-LIB2 encoding and the external solver session."""

from tracehound.smt.encoder import SmtEncoder, encode
from tracehound.smt.solver import CachingSolver, Sat, SolverResult, SolverSession, Unknown, Unsat, check

__all__ = [
    "SmtEncoder",
    "encode",
    "CachingSolver",
    "Sat",
    "SolverResult",
    "SolverSession",
    "Unknown",
    "Unsat",
    "check",
]
