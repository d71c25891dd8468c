"""Transition labels and projected traces."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Tuple, Union

from tracehound.chainstate.state import AccountState, Message, format_address


class LabelKind(str, Enum):
    SSTORE = "SStore"
    SLOAD = "SLoad"
    CALL = "Call"
    DELEGATECALL = "DelegateCall"
    SUICIDE = "Suicide"
    INTERNAL = "Internal"


@dataclass(frozen=True)
class SStore:
    key: int
    val: int
    kind = LabelKind.SSTORE

    def signature(self) -> Tuple:
        return (self.kind.value, self.key, self.val)


@dataclass(frozen=True)
class SLoad:
    key: int
    val: int
    kind = LabelKind.SLOAD

    def signature(self) -> Tuple:
        return (self.kind.value, self.key, self.val)


@dataclass(frozen=True)
class Call:
    target: int
    msg: Message
    kind = LabelKind.CALL

    def signature(self) -> Tuple:
        return (self.kind.value, self.target, self.msg.value)


@dataclass(frozen=True)
class DelegateCall:
    target: int
    kind = LabelKind.DELEGATECALL

    def signature(self) -> Tuple:
        return (self.kind.value, self.target)


@dataclass(frozen=True)
class Suicide:
    beneficiary: int
    kind = LabelKind.SUICIDE

    def signature(self) -> Tuple:
        return (self.kind.value, self.beneficiary)


@dataclass(frozen=True)
class Internal:
    kind = LabelKind.INTERNAL

    def signature(self) -> Tuple:
        return (self.kind.value,)


Label = Union[SStore, SLoad, Call, DelegateCall, Suicide, Internal]

INTERNAL = Internal()


def describe(label: Label) -> str:
    if isinstance(label, (SStore, SLoad)):
        return f"{label.kind.value}(0x{label.key:x}, 0x{label.val:x})"
    if isinstance(label, Call):
        return f"Call({format_address(label.target)}, value={label.msg.value})"
    if isinstance(label, DelegateCall):
        return f"DelegateCall({format_address(label.target)})"
    if isinstance(label, Suicide):
        return f"Suicide({format_address(label.beneficiary)})"
    return "Internal"


@dataclass(frozen=True)
class ContractView:
    """The subject contract as seen from a trace: balance plus non-zero storage."""

    balance: int
    storage: Tuple[Tuple[int, int], ...] = ()
    has_code: bool = True

    @classmethod
    def of(cls, acct: AccountState) -> "ContractView":
        return cls(acct.balance, tuple(sorted((k, v) for k, v in acct.storage.items() if v)), acct.has_code)

    def load(self, key: int) -> int:
        return dict(self.storage).get(key, 0)

    def image(self) -> List[int]:
        return sorted({v for _, v in self.storage})


@dataclass(frozen=True)
class TraceEntry:
    state: ContractView
    label: Label


@dataclass
class Trace:
    subject: int
    entries: List[TraceEntry] = field(default_factory=list)
    halts: List = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[TraceEntry]:
        return iter(self.entries)

    def append(self, state: ContractView, label: Label) -> None:
        self.entries.append(TraceEntry(state, label))

    def extend(self, other: "Trace") -> None:
        self.entries.extend(other.entries)
        self.halts.extend(other.halts)

    def labels(self) -> List[Label]:
        return [e.label for e in self.entries]

    def significant(self) -> List[Label]:
        """Labels other than Internal, in order."""
        return [e.label for e in self.entries if e.label.kind is not LabelKind.INTERNAL]

    def last_label(self) -> Label:
        return self.entries[-1].label if self.entries else INTERNAL

    def count(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for e in self.entries:
            out[e.label.kind.value] = out.get(e.label.kind.value, 0) + 1
        return out
