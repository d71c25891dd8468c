"""Service layer shared by the CLI and the API server."""

from tracehound.services.analysis_service import (
    analyze_category,
    analyze_contract,
    build_report,
    depth_sweep,
    exploration_summary,
    has_true_positive,
    is_dead,
    render_depth_table,
    render_summary,
    summarize,
)
from tracehound.services.corpus_service import (
    BYTECODE_SUFFIXES,
    analyze_file,
    corpus_address,
    discover_bytecode_files,
    place_contract,
    run_corpus,
)

__all__ = [
    "analyze_category",
    "analyze_contract",
    "build_report",
    "depth_sweep",
    "exploration_summary",
    "has_true_positive",
    "is_dead",
    "render_depth_table",
    "render_summary",
    "summarize",
    "BYTECODE_SUFFIXES",
    "analyze_file",
    "corpus_address",
    "discover_bytecode_files",
    "place_contract",
    "run_corpus",
]
