"""Locating the SMT solver executable."""

import os
import shutil
import sys
from pathlib import Path
from typing import Optional

SOLVER_NAME = "z3"


def resolve_solver_path(explicit: Optional[str] = None) -> Optional[str]:
    """
    Resolve the solver binary.

    Order:
    - explicit argument (CLI --solver-path or AnalysisConfig.solver_path)
    - TRACEHOUND_SOLVER_PATH
    - `z3` on PATH
    - `z3` next to the running interpreter (virtualenv installs of z3-solver)
    """
    for candidate in (explicit, os.getenv("TRACEHOUND_SOLVER_PATH")):
        if candidate:
            found = shutil.which(str(Path(candidate).expanduser()))
            return found or str(Path(candidate).expanduser())
    found = shutil.which(SOLVER_NAME)
    if found:
        return found
    beside = Path(sys.executable).parent / SOLVER_NAME
    if beside.is_file() and os.access(beside, os.X_OK):
        return str(beside)
    return None
