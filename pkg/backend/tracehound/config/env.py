"""Environment variable and .env file management."""

from pathlib import Path
from typing import Dict, List

from dotenv import load_dotenv

from tracehound.paths import get_home_dir

# Every variable tracehound reads, with the help text the CLI prints.
KNOWN_VARIABLES: Dict[str, str] = {
    "TRACEHOUND_SOLVER_PATH": "SMT solver executable (default: z3 on PATH)",
    "TRACEHOUND_SOLVER_TIMEOUT": "Seconds per solver query (default 10)",
    "TRACEHOUND_MAX_TIME": "Seconds per contract analysis (default 300)",
    "TRACEHOUND_DEPTH": "Invocation depth k (default 3)",
    "TRACEHOUND_WORKERS": "Worker processes for corpus runs",
    "TRACEHOUND_HOME": "Base directory for tracehound state",
    "TRACEHOUND_REPORTS_DIR": "Override report directory",
    "TRACEHOUND_LOG_LEVEL": "DEBUG, INFO, WARNING or ERROR",
}


def get_user_env_path() -> Path:
    """Store config under tracehound home dir (user-local dotfile)."""
    return get_home_dir() / ".env.local"


def load_env_files() -> List[Path]:
    """
    Load dotenv files without overriding variables that are already set.

    Order: ./.env.local, then <home>/.env.local, then ./.env.
    Returns the files that existed.
    """
    loaded: List[Path] = []
    for path in (Path(".env.local"), get_user_env_path(), Path(".env")):
        if path.is_file():
            load_dotenv(str(path), override=False)
            loaded.append(path)
    return loaded
