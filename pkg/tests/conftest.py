"""Pytest configuration and fixtures."""

import sys
from pathlib import Path

import pytest

# Add project root to Python path for imports
project_root = Path(__file__).parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

# Add backend directory to Python path so tracehound can be imported as a top-level package
backend_dir = project_root / "backend"
if str(backend_dir) not in sys.path:
    sys.path.insert(0, str(backend_dir))

from tracehound.config.solver import resolve_solver_path  # noqa: E402
from tracehound.fixtures import FIXTURE_BLOCK, corpus_snapshot  # noqa: E402


def pytest_collection_modifyitems(config, items):
    """Skip `solver` tests when no solver binary resolves."""
    if resolve_solver_path() is not None:
        return
    skip = pytest.mark.skip(reason="no SMT solver found (set TRACEHOUND_SOLVER_PATH or install z3-solver)")
    for item in items:
        if "solver" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def solver_path():
    """Resolved solver executable; skips the test when there is none."""
    path = resolve_solver_path()
    if path is None:
        pytest.skip("no SMT solver found")
    return path


@pytest.fixture
def fixture_block():
    return FIXTURE_BLOCK


@pytest.fixture
def fixture_chain():
    """Every fixture contract in one fresh chain state."""
    return corpus_snapshot()


@pytest.fixture
def isolated_home(tmp_path, monkeypatch):
    """Keep reports and dotfiles out of the real home directory."""
    monkeypatch.setenv("TRACEHOUND_HOME", str(tmp_path / "home"))
    for name in (
        "TRACEHOUND_DEPTH",
        "TRACEHOUND_MAX_TIME",
        "TRACEHOUND_SOLVER_TIMEOUT",
        "TRACEHOUND_WORKERS",
        "TRACEHOUND_REPORTS_DIR",
        "TRACEHOUND_LOG_LEVEL",
    ):
        monkeypatch.delenv(name, raising=False)
    return tmp_path / "home"
