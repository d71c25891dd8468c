"""Report JSON schema: per-contract results and the corpus summary."""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class ExplorationSummary(BaseModel):
    """Statistics of one symbolic exploration."""

    paths_explored: int = Field(0, ge=0, description="Paths that reached a halt or a cut")
    states_visited: int = Field(0, ge=0, description="Instructions stepped")
    pruned: Dict[str, int] = Field(default_factory=dict, description="Pruned paths by reason")
    solver_calls: int = Field(0, ge=0, description="Queries sent to the solver")
    elapsed_s: float = Field(0.0, ge=0, description="Wall-clock seconds")
    budget_hit: bool = Field(False, description="Whether the time budget expired")
    incomplete: bool = Field(False, description="Budget expiry or solver Unknown on a deciding query")
    skipped: Optional[str] = Field(None, description="Why the search did not run (precondition, rejects_ether)")


class CategoryResult(BaseModel):
    """Outcome for one category on one contract."""

    category: str = Field(..., description="prodigal, suicidal or greedy")
    flagged: bool = Field(..., description="At least one candidate found")
    candidates: List[Dict[str, Any]] = Field(default_factory=list, description="Candidate records")
    verdicts: List[Dict[str, Any]] = Field(default_factory=list, description="Concrete validation verdicts")
    exploration: ExplorationSummary = Field(default_factory=ExplorationSummary)
    depth_sweep: Optional[Dict[int, bool]] = Field(None, description="Flagged per invocation depth 1..k")


class ContractReport(BaseModel):
    """Everything tracehound found for one contract."""

    address: Optional[str] = Field(None, description="Subject address, 0x-prefixed")
    source: Optional[str] = Field(None, description="Bytecode file or fixture the contract came from")
    bytecode_digest: Optional[str] = Field(None, description="Keccak-256 of the runtime bytecode")
    results: List[CategoryResult] = Field(default_factory=list)
    error: Optional[str] = Field(None, description="Load or analysis failure; results are empty when set")

    def result(self, category: str) -> Optional[CategoryResult]:
        for r in self.results:
            if r.category == category:
                return r
        return None


class CategorySummary(BaseModel):
    """One row of the summary table."""

    category: str
    flagged: int = Field(0, ge=0, description="Contracts flagged")
    distinct_by_digest: int = Field(0, ge=0, description="Flagged contracts with distinct bytecode")
    validated: int = Field(0, ge=0, description="Candidates with a TruePositive or FalsePositive verdict")
    true_positives: int = Field(0, ge=0)
    true_positive_rate: Optional[float] = Field(None, ge=0, le=1, description="true_positives / validated")


class CorpusSummary(BaseModel):
    contracts: int = Field(0, ge=0, description="Contracts in the run")
    errors: int = Field(0, ge=0, description="Contracts that failed to load or analyze")
    categories: List[CategorySummary] = Field(default_factory=list)


class CorpusReport(BaseModel):
    """Report document written by `analyze` and `corpus`."""

    tool: str = "tracehound"
    version: str = Field(..., description="tracehound version")
    snapshot_digest: Optional[str] = Field(None, description="Digest of the starting snapshot")
    config: Dict[str, Any] = Field(default_factory=dict, description="Analysis settings used")
    contracts: List[ContractReport] = Field(default_factory=list)
    summary: CorpusSummary = Field(default_factory=CorpusSummary)
