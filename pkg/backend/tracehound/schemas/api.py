"""Request bodies accepted by the analysis API."""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from tracehound.config.settings import ALL_CATEGORIES, Category, ReplayMode


class AnalyzeRequest(BaseModel):
    bytecode: str = Field(..., min_length=1, description="Runtime bytecode, hex with optional 0x")
    snapshot: Optional[Dict[str, Any]] = Field(None, description="Snapshot document; an empty chain when absent")
    address: Optional[str] = Field(None, description="Account the bytecode lives at")
    categories: List[Category] = Field(default_factory=lambda: list(ALL_CATEGORIES), min_length=1)
    validate_candidates: bool = Field(False, alias="validate", description="Replay candidates on a sandbox fork")
    depth: Optional[int] = Field(None, gt=0, description="Invocation depth")
    max_cfg_nodes: Optional[int] = Field(None, gt=0)
    max_call_depth: Optional[int] = Field(None, gt=0)
    solver_timeout_s: Optional[float] = Field(None, gt=0)
    max_time_s: Optional[float] = Field(None, gt=0)
    array_bound: Optional[int] = Field(None, gt=0)
    replay_mode: ReplayMode = Field(ReplayMode.AUTO)
    depth_sweep: bool = Field(False, description="Also report flags at every shallower depth")
    alternate_snapshots: Dict[str, Dict[str, Any]] = Field(
        default_factory=dict,
        description="Address -> earlier snapshot document in which that account is still alive",
    )

    class Config:
        extra = "forbid"
        populate_by_name = True


class PosthumousRequest(BaseModel):
    snapshot: Dict[str, Any] = Field(..., description="Snapshot document")

    class Config:
        extra = "forbid"
