"""Hand-assembled contracts with known verdicts."""

from tracehound.fixtures.contracts import (
    FIXTURE_BLOCK,
    FIXTURES,
    Fixture,
    corpus_snapshot,
    export_fixtures,
    fixture_address,
    get_fixture,
    load_expectations,
    mapping_slot,
    selector,
)

__all__ = [
    "FIXTURE_BLOCK",
    "FIXTURES",
    "Fixture",
    "corpus_snapshot",
    "export_fixtures",
    "fixture_address",
    "get_fixture",
    "load_expectations",
    "mapping_slot",
    "selector",
]
