"""Analysis and validation settings."""

import logging
import os
from enum import Enum
from typing import Any, Optional

from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

DEFAULT_ENDOWMENT_WEI = 10**18
# Sandbox account that funds subjects and greedy acceptance checks during validation.
HARNESS_ADDRESS = 0xC0FFEE0000000000000000000000000000C0FFEE


class Category(str, Enum):
    PRODIGAL = "prodigal"
    SUICIDAL = "suicidal"
    GREEDY = "greedy"


ALL_CATEGORIES = (Category.PRODIGAL, Category.SUICIDAL, Category.GREEDY)


class ReplayMode(str, Enum):
    """How the validator picks block context for replayed messages."""

    AUTO = "auto"
    MODEL = "model"
    SNAPSHOT = "snapshot"


def _env_number(name: str, cast: type) -> Optional[Any]:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return None
    try:
        value = cast(raw)
    except ValueError:
        logger.warning("ignoring %s=%r: not a number", name, raw)
        return None
    if value <= 0:
        logger.warning("ignoring %s=%r: must be positive", name, raw)
        return None
    return value


def get_solver_timeout() -> Optional[float]:
    return _env_number("TRACEHOUND_SOLVER_TIMEOUT", float)


def get_max_time() -> Optional[float]:
    return _env_number("TRACEHOUND_MAX_TIME", float)


def get_default_depth() -> Optional[int]:
    return _env_number("TRACEHOUND_DEPTH", int)


def get_workers() -> int:
    """Worker count for corpus runs: TRACEHOUND_WORKERS, else the CPU count."""
    return _env_number("TRACEHOUND_WORKERS", int) or max(1, os.cpu_count() or 1)


class AnalysisConfig(BaseModel):
    """Bounds and switches for one symbolic exploration."""

    invocation_depth: int = Field(3, gt=0, description="Invocation depth k: messages per explored trace")
    max_call_depth: int = Field(3, gt=0, description="Calls taken per invocation before the path is cut")
    max_cfg_nodes: int = Field(60, gt=0, description="Jumps taken per invocation before the path is cut")
    solver_timeout_s: float = Field(10, gt=0, description="Timeout per solver query")
    max_analysis_time_s: float = Field(300, gt=0, description="Wall-clock budget per exploration")
    array_bound: int = Field(2, gt=0, description="Witnesses per dynamic array access")
    calldata_cap: int = Field(1024, gt=0, description="Upper bound on symbolic CALLDATASIZE in bytes")
    memoize: bool = Field(True, description="Prune revisits of already explored configurations")
    max_candidates: int = Field(1, gt=0, description="Stop after this many candidates")
    category: Category = Field(Category.PRODIGAL, description="Property being searched for")
    endowment_wei: int = Field(DEFAULT_ENDOWMENT_WEI, gt=0, description="Balance assumed for an unfunded subject")
    solver_path: Optional[str] = Field(None, description="Explicit solver executable")

    class Config:
        extra = "forbid"
        frozen = True

    @classmethod
    def from_env(cls, **overrides: Any) -> "AnalysisConfig":
        """Defaults, overridden by environment, overridden by non-None keyword arguments."""
        values: dict = {}
        env = {
            "invocation_depth": get_default_depth(),
            "solver_timeout_s": get_solver_timeout(),
            "max_analysis_time_s": get_max_time(),
            "solver_path": os.getenv("TRACEHOUND_SOLVER_PATH") or None,
        }
        values.update({k: v for k, v in env.items() if v is not None})
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def for_category(self, category: Category) -> "AnalysisConfig":
        return self.model_copy(update={"category": category})

    def with_depth(self, depth: int) -> "AnalysisConfig":
        return self.model_copy(update={"invocation_depth": depth})


class ValidationConfig(BaseModel):
    """Sandbox replay settings."""

    endowment_wei: int = Field(DEFAULT_ENDOWMENT_WEI, gt=0, description="Funding for an empty subject")
    harness_address: int = Field(HARNESS_ADDRESS, ge=0, lt=1 << 160, description="Funding account")
    replay_mode: ReplayMode = Field(ReplayMode.AUTO, description="Block context used for replay")
    step_limit: int = Field(1_000_000, gt=0, description="Instructions per replayed transaction")
    block_interval_s: int = Field(15, gt=0, description="Seconds between sandbox blocks")

    class Config:
        extra = "forbid"
        frozen = True
