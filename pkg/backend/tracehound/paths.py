import os
from pathlib import Path


def _xdg_dir(env_key: str, fallback: Path) -> Path:
    value = os.getenv(env_key)
    if value:
        return Path(value).expanduser()
    return fallback


def get_home_dir() -> Path:
    """
    Base dir for tracehound state.

    Priority:
    1) TRACEHOUND_HOME
    2) XDG_DATA_HOME/tracehound
    3) ~/.local/share/tracehound
    """
    if os.getenv("TRACEHOUND_HOME"):
        return Path(os.environ["TRACEHOUND_HOME"]).expanduser()
    data_home = _xdg_dir("XDG_DATA_HOME", Path.home() / ".local" / "share")
    return data_home / "tracehound"


def get_reports_dir() -> Path:
    """Where `analyze` and `corpus` write reports when --out is not given."""
    if os.getenv("TRACEHOUND_REPORTS_DIR"):
        return Path(os.environ["TRACEHOUND_REPORTS_DIR"]).expanduser()
    return get_home_dir() / "reports"


def get_report_path(name: str) -> Path:
    """Report file for one contract or corpus run: <reports>/<name>.json"""
    safe = "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in name.strip()) or "report"
    return get_reports_dir() / f"{safe}.json"


def ensure_dirs() -> None:
    get_reports_dir().mkdir(parents=True, exist_ok=True)
