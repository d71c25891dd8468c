"""Expected-verdict schema for the fixture corpus."""

from typing import Dict, List, Optional

from pydantic import BaseModel, Field, TypeAdapter

from tracehound.config.settings import Category, ReplayMode


class FixtureExpectation(BaseModel):
    """What analyzing one fixture for one category must produce."""

    fixture: str = Field(..., description="Fixture name")
    category: Category = Field(..., description="Property searched for")
    expect_flagged_at_depth: Dict[int, bool] = Field(..., description="Invocation depth -> flagged")
    expect_verdict: Optional[str] = Field(
        None,
        pattern=r"^(TruePositive|FalsePositive|NotValidatable)$",
        description="Verdict of the first candidate at the deepest listed depth; null when nothing is flagged",
    )
    greedy_category: Optional[str] = Field(None, description="CategoryI or CategoryII for greedy fixtures")
    replay_mode: Optional[ReplayMode] = Field(None, description="Replay mode the verdict assumes (default auto)")
    note: Optional[str] = Field(None, description="Free-form remark")

    class Config:
        extra = "forbid"

    @property
    def deepest(self) -> int:
        return max(self.expect_flagged_at_depth)


FixtureExpectations = TypeAdapter(List[FixtureExpectation])
