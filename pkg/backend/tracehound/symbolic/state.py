"""Symbolic labels and the per-path state explored by the engine."""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

from tracehound.chainstate.state import Message, format_address
from tracehound.evm.interpreter import HaltKind
from tracehound.evm.labels import Call, DelegateCall, Label, LabelKind, SLoad, SStore, Suicide
from tracehound.symbolic.expr import Const, SymValue, evaluate
from tracehound.symbolic.memory import SymMemory


@dataclass(frozen=True)
class SymLabel:
    """A label with symbolic fields, tagged with the invocation that emitted it."""

    kind: LabelKind
    invocation: int
    key: Optional[SymValue] = None
    val: Optional[SymValue] = None
    target: Optional[SymValue] = None
    value: Optional[SymValue] = None

    @property
    def is_release(self) -> bool:
        return self.kind in (LabelKind.CALL, LabelKind.DELEGATECALL, LabelKind.SUICIDE)

    def concrete(self, model: Optional[Dict[str, int]] = None, subject: int = 0) -> Label:
        """The concrete label under model (all fields must be constant when model is None)."""

        def word(v: Optional[SymValue]) -> int:
            if v is None:
                return 0
            if isinstance(v, Const):
                return v.value
            if model is None:
                raise ValueError(f"symbolic field in {self.kind.value} label")
            return evaluate(v, model)

        if self.kind is LabelKind.SSTORE:
            return SStore(word(self.key), word(self.val))
        if self.kind is LabelKind.SLOAD:
            return SLoad(word(self.key), word(self.val))
        if self.kind is LabelKind.CALL:
            target = word(self.target)
            return Call(target, Message(subject, word(self.value), b"", target))
        if self.kind is LabelKind.DELEGATECALL:
            return DelegateCall(word(self.target))
        return Suicide(word(self.target))

    def describe(self, model: Optional[Dict[str, int]] = None) -> str:
        label = self.concrete(model or {})
        if isinstance(label, Call):
            return f"Call({format_address(label.target)}, value={label.msg.value})"
        if isinstance(label, (DelegateCall, Suicide)):
            addr = label.target if isinstance(label, DelegateCall) else label.beneficiary
            return f"{self.kind.value}({format_address(addr)})"
        return f"{self.kind.value}(0x{label.key:x}, 0x{label.val:x})"


@dataclass(frozen=True)
class PendingViolation:
    """A flagged label waiting for its invocation to end at a valid halt."""

    label: SymLabel
    condition: SymValue
    drain: Optional[SymValue] = None


@dataclass
class SymState:
    pc: int
    stack: List[SymValue]
    memory: SymMemory
    # key fingerprint -> (key, value); concrete keys read through to the snapshot
    storage: Dict[bytes, Tuple[SymValue, SymValue]]
    balance: SymValue
    constraints: Tuple[SymValue, ...] = ()
    cfps: FrozenSet[bytes] = frozenset()
    invocation: int = 0
    cfg_nodes: int = 0
    call_depth: int = 0
    labels: Tuple[SymLabel, ...] = ()
    pending: Tuple[PendingViolation, ...] = ()
    pins: Dict[bytes, SymValue] = field(default_factory=dict)
    fresh: int = 0
    halt: Optional[HaltKind] = None
    # storage and balance at the start of the current invocation (rollback point)
    entry_storage: Optional[Dict[bytes, Tuple[SymValue, SymValue]]] = None
    entry_balance: Optional[SymValue] = None

    def fork(self) -> "SymState":
        return SymState(
            pc=self.pc,
            stack=list(self.stack),
            memory=self.memory.copy(),
            storage=dict(self.storage),
            balance=self.balance,
            constraints=self.constraints,
            cfps=self.cfps,
            invocation=self.invocation,
            cfg_nodes=self.cfg_nodes,
            call_depth=self.call_depth,
            labels=self.labels,
            pending=self.pending,
            pins=dict(self.pins),
            fresh=self.fresh,
            halt=self.halt,
            entry_storage=self.entry_storage,
            entry_balance=self.entry_balance,
        )

    def constrain(self, *conds: SymValue) -> None:
        """Append constraints that are not already present."""
        added = [c for c in conds if c.fp not in self.cfps and not (isinstance(c, Const) and c.value)]
        if added:
            self.constraints = self.constraints + tuple(added)
            self.cfps = self.cfps | {c.fp for c in added}

    def emit(self, label: SymLabel) -> None:
        self.labels = self.labels + (label,)

    def next_name(self, prefix: str) -> str:
        self.fresh += 1
        return f"{prefix}_{self.invocation}_{self.fresh}"

    def current_labels(self) -> List[SymLabel]:
        return [lb for lb in self.labels if lb.invocation == self.invocation]
