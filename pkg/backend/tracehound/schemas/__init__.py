"""Pydantic schemas for snapshots, reports and fixture expectations."""

from tracehound.schemas.snapshot import AccountSchema, BlockSchema, SnapshotSchema
from tracehound.schemas.report import (
    CategoryResult,
    CategorySummary,
    ContractReport,
    CorpusReport,
    CorpusSummary,
    ExplorationSummary,
)
from tracehound.schemas.fixtures import FixtureExpectation, FixtureExpectations
from tracehound.schemas.api import AnalyzeRequest, PosthumousRequest

__all__ = [
    "AccountSchema",
    "BlockSchema",
    "SnapshotSchema",
    "CategoryResult",
    "CategorySummary",
    "ContractReport",
    "CorpusReport",
    "CorpusSummary",
    "ExplorationSummary",
    "FixtureExpectation",
    "FixtureExpectations",
    "AnalyzeRequest",
    "PosthumousRequest",
]
