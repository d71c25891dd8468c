"""Concrete replay of symbolic candidates on sandbox forks."""

from tracehound.validation.validators import (
    BaseValidator,
    GreedyValidator,
    ProdigalValidator,
    Sandbox,
    SuicidalValidator,
    Verdict,
    VerdictStatus,
    open_sandbox,
    replay_blocks,
    validate_greedy,
    validate_prodigal,
    validate_suicidal,
    validator_for,
)
from tracehound.validation.validation_runner import ValidationRunner

__all__ = [
    "BaseValidator",
    "GreedyValidator",
    "ProdigalValidator",
    "Sandbox",
    "SuicidalValidator",
    "Verdict",
    "VerdictStatus",
    "open_sandbox",
    "replay_blocks",
    "validate_greedy",
    "validate_prodigal",
    "validate_suicidal",
    "validator_for",
    "ValidationRunner",
]
