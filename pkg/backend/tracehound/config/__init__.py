"""Configuration modules for the tracehound package."""

from tracehound.config.settings import (
    ALL_CATEGORIES,
    DEFAULT_ENDOWMENT_WEI,
    HARNESS_ADDRESS,
    AnalysisConfig,
    Category,
    ReplayMode,
    ValidationConfig,
    get_default_depth,
    get_max_time,
    get_solver_timeout,
    get_workers,
)
from tracehound.config.env import (
    KNOWN_VARIABLES,
    get_user_env_path,
    load_env_files,
)
from tracehound.config.solver import resolve_solver_path

__all__ = [
    "ALL_CATEGORIES",
    "DEFAULT_ENDOWMENT_WEI",
    "HARNESS_ADDRESS",
    "AnalysisConfig",
    "Category",
    "ReplayMode",
    "ValidationConfig",
    "get_default_depth",
    "get_max_time",
    "get_solver_timeout",
    "get_workers",
    "KNOWN_VARIABLES",
    "get_user_env_path",
    "load_env_files",
    "resolve_solver_path",
]
