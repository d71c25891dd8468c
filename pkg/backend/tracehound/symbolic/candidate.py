"""Exploration outputs: candidates, acceptance results and statistics."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from tracehound.chainstate.state import Message, format_address, parse_address
from tracehound.config.settings import Category


@dataclass
class Candidate:
    category: Category
    subject: int
    messages: List[Message] = field(default_factory=list)
    attacker: int = 0
    flagged_label: str = ""
    label_kind: Optional[str] = None
    beneficiary: Optional[int] = None
    path_digest: str = ""
    block_schedule: List[Tuple[int, int]] = field(default_factory=list)
    model_verified: bool = False
    funding_message: Optional[Message] = None
    greedy_category: Optional[str] = None
    exhaustive: bool = True
    confidence: str = "high"
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "category": self.category.value,
            "subject": format_address(self.subject),
            "messages": [m.to_dict() for m in self.messages],
            "attacker": format_address(self.attacker),
            "flagged_label": self.flagged_label,
            "label_kind": self.label_kind,
            "beneficiary": format_address(self.beneficiary) if self.beneficiary is not None else None,
            "path_digest": self.path_digest,
            "block_schedule": [{"number": n, "timestamp": t} for n, t in self.block_schedule],
            "model_verified": self.model_verified,
            "funding_message": self.funding_message.to_dict() if self.funding_message else None,
            "greedy_category": self.greedy_category,
            "exhaustive": self.exhaustive,
            "confidence": self.confidence,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "Candidate":
        funding = d.get("funding_message")
        beneficiary = d.get("beneficiary")
        return cls(
            category=Category(d["category"]),
            subject=parse_address(d["subject"]),
            messages=[Message.from_dict(m) for m in d.get("messages") or []],
            attacker=parse_address(d["attacker"]),
            flagged_label=d.get("flagged_label") or "",
            label_kind=d.get("label_kind"),
            beneficiary=parse_address(beneficiary) if beneficiary else None,
            path_digest=d.get("path_digest") or "",
            block_schedule=[(b["number"], b["timestamp"]) for b in d.get("block_schedule") or []],
            model_verified=bool(d.get("model_verified")),
            funding_message=Message.from_dict(funding) if funding else None,
            greedy_category=d.get("greedy_category"),
            exhaustive=d.get("exhaustive", True),
            confidence=d.get("confidence") or "high",
            notes=list(d.get("notes") or []),
        )


@dataclass
class EtherAcceptance:
    """Whether some invocation takes a positive value to a valid STOP/RETURN."""

    accepted: bool
    message: Optional[Message] = None
    incomplete: bool = False

    def __bool__(self) -> bool:
        return self.accepted


@dataclass
class ExplorationStats:
    paths_explored: int = 0
    states_visited: int = 0
    pruned: Dict[str, int] = field(default_factory=dict)
    solver_calls: int = 0
    elapsed_s: float = 0.0
    budget_hit: bool = False

    def prune(self, reason: str) -> None:
        self.pruned[reason] = self.pruned.get(reason, 0) + 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "paths_explored": self.paths_explored,
            "states_visited": self.states_visited,
            "pruned": dict(sorted(self.pruned.items())),
            "solver_calls": self.solver_calls,
            "elapsed_s": round(self.elapsed_s, 3),
            "budget_hit": self.budget_hit,
        }


@dataclass
class ExplorationResult:
    candidates: List[Candidate]
    stats: ExplorationStats
    incomplete: bool = False
    skipped: Optional[str] = None
