"""
Trace properties: leaky (safety) and locking (liveness) predicate sets and
their prodigal, suicidal and greedy instantiations.

Each set carries two readings of the same predicates. The concrete reading
judges recorded traces; the symbolic reading produces constraint words the
engine hands to the solver.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence

from tracehound.bytecode import Program, contains_opcode, contains_release_opcode
from tracehound.chainstate.state import ChainState, Message, scan_posthumous
from tracehound.config.settings import Category
from tracehound.evm.labels import Call, DelegateCall, LabelKind, Suicide, Trace, TraceEntry
from tracehound.symbolic.expr import ONE, ZERO, SymValue, conj, const, mk, negate
from tracehound.symbolic.state import SymLabel
from tracehound.words import ADDRESS_MASK

# Addresses at or below this are reserved (precompiles and the zero address).
RESERVED_ADDRESS_CEILING = 0xFFFF


class Mode(str, Enum):
    SAFETY = "safety"
    LIVENESS = "liveness"


class GreedyCategory(str, Enum):
    CATEGORY_I = "CategoryI"
    CATEGORY_II = "CategoryII"
    NOT_GREEDY_CANDIDATE = "NotGreedyCandidate"


@dataclass
class SymbolicContext:
    """What the symbolic predicates may refer to."""

    program: Program
    subject: int
    caller: SymValue
    callvalues: List[SymValue]
    storage_image: List[int] = field(default_factory=list)
    contract_addresses: List[int] = field(default_factory=list)
    excluded_addresses: List[int] = field(default_factory=list)


ConcretePre = Callable[[Program, TraceEntry, Message], bool]
ConcreteSide = Callable[[TraceEntry, Message], bool]
SymbolicPre = Callable[[SymbolicContext], Optional[List[SymValue]]]
SymbolicLabelCondition = Callable[[SymLabel, SymbolicContext], SymValue]


@dataclass(frozen=True)
class TracePredicateSet:
    category: Category
    mode: Mode
    pre: ConcretePre
    side: ConcreteSide
    post: Optional[ConcreteSide]
    sym_pre: SymbolicPre
    sym_side: SymbolicLabelCondition
    sym_post: Optional[SymbolicLabelCondition] = None

    def __post_init__(self):
        if self.mode is Mode.SAFETY and (self.post is None or self.sym_post is None):
            raise ValueError("a safety predicate set needs a postcondition")
        if self.mode is Mode.LIVENESS and (self.post is not None or self.sym_post is not None):
            raise ValueError("a liveness predicate set has no postcondition")


def _always(*_args) -> bool:
    return True


def _true_condition(label: SymLabel, ctx: SymbolicContext) -> SymValue:
    return ONE


def _sender_outside_state(entry: TraceEntry, m0: Message) -> bool:
    return m0.sender not in entry.state.image() and m0.sender != m0.recipient


def _attacker_constraints(ctx: SymbolicContext) -> List[SymValue]:
    """The caller is an external account that does not appear in the subject's state."""
    caller = ctx.caller
    out = [
        mk("gt", caller, const(RESERVED_ADDRESS_CEILING)),
        negate(mk("eq", caller, const(ctx.subject))),
    ]
    for addr in sorted(set(ctx.contract_addresses) | set(ctx.excluded_addresses)):
        out.append(negate(mk("eq", caller, const(addr))))
    for value in ctx.storage_image:
        out.append(negate(mk("eq", caller, const(value))))
        if value & ADDRESS_MASK != value:
            out.append(negate(mk("eq", caller, const(value & ADDRESS_MASK))))
    return out


# -- prodigal ----------------------------------------------------------------


def _prodigal_pre(code: Program, first: TraceEntry, m0: Message) -> bool:
    return _sender_outside_state(first, m0) and m0.value == 0


def _prodigal_post(entry: TraceEntry, m0: Message) -> bool:
    label = entry.label
    if isinstance(label, Call):
        return label.target == m0.sender and label.msg.value > 0
    if isinstance(label, DelegateCall):
        return label.target == m0.sender
    if isinstance(label, Suicide):
        return label.beneficiary == m0.sender
    return False


def _prodigal_sym_pre(ctx: SymbolicContext) -> List[SymValue]:
    # no monetary contribution in any message, not only the first
    return _attacker_constraints(ctx) + [mk("eq", cv, ZERO) for cv in ctx.callvalues]


def _prodigal_sym_post(label: SymLabel, ctx: SymbolicContext) -> SymValue:
    if label.kind is LabelKind.CALL:
        return conj(mk("eq", label.target, ctx.caller), mk("gt", label.value, ZERO))
    if label.kind in (LabelKind.DELEGATECALL, LabelKind.SUICIDE):
        return mk("eq", label.target, ctx.caller)
    return ZERO


def prodigal_predicates() -> TracePredicateSet:
    return TracePredicateSet(
        category=Category.PRODIGAL,
        mode=Mode.SAFETY,
        pre=_prodigal_pre,
        side=_always,
        post=_prodigal_post,
        sym_pre=_prodigal_sym_pre,
        sym_side=_true_condition,
        sym_post=_prodigal_sym_post,
    )


# -- suicidal ----------------------------------------------------------------


def _suicidal_pre(code: Program, first: TraceEntry, m0: Message) -> bool:
    return contains_opcode(code, ["SUICIDE"]) and _sender_outside_state(first, m0)


def _suicidal_post(entry: TraceEntry, m0: Message) -> bool:
    return isinstance(entry.label, Suicide)


def _suicidal_sym_pre(ctx: SymbolicContext) -> Optional[List[SymValue]]:
    if not contains_opcode(ctx.program, ["SUICIDE"]):
        return None
    return _attacker_constraints(ctx)


def _suicidal_sym_post(label: SymLabel, ctx: SymbolicContext) -> SymValue:
    return ONE if label.kind is LabelKind.SUICIDE else ZERO


def suicidal_predicates() -> TracePredicateSet:
    return TracePredicateSet(
        category=Category.SUICIDAL,
        mode=Mode.SAFETY,
        pre=_suicidal_pre,
        side=_always,
        post=_suicidal_post,
        sym_pre=_suicidal_sym_pre,
        sym_side=_true_condition,
        sym_post=_suicidal_sym_post,
    )


# -- greedy ------------------------------------------------------------------


def _greedy_pre(code: Program, first: TraceEntry, m0: Message) -> bool:
    return first.state.balance > 0


def _no_release(entry: TraceEntry, m0: Message) -> bool:
    label = entry.label
    if isinstance(label, Call):
        return label.msg.value == 0
    return not isinstance(label, (DelegateCall, Suicide))


def _greedy_sym_pre(ctx: SymbolicContext) -> List[SymValue]:
    return []


def _greedy_sym_side(label: SymLabel, ctx: SymbolicContext) -> SymValue:
    """Condition under which the label releases nothing."""
    if label.kind is LabelKind.CALL:
        return mk("eq", label.value, ZERO)
    if label.kind in (LabelKind.DELEGATECALL, LabelKind.SUICIDE):
        return ZERO
    return ONE


def greedy_predicates(k: int = 3) -> TracePredicateSet:
    """Locking within traces of at most k messages; k bounds the exploration, not the predicates."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return TracePredicateSet(
        category=Category.GREEDY,
        mode=Mode.LIVENESS,
        pre=_greedy_pre,
        side=_no_release,
        post=None,
        sym_pre=_greedy_sym_pre,
        sym_side=_greedy_sym_side,
    )


def predicates_for(category: Category, k: int = 3) -> TracePredicateSet:
    if category is Category.PRODIGAL:
        return prodigal_predicates()
    if category is Category.SUICIDAL:
        return suicidal_predicates()
    return greedy_predicates(k)


def greedy_classify(p: Program, accepts_ether: bool) -> GreedyCategory:
    if not accepts_ether:
        return GreedyCategory.NOT_GREEDY_CANDIDATE
    if contains_release_opcode(p):
        return GreedyCategory.CATEGORY_II
    return GreedyCategory.CATEGORY_I


# -- judging concrete traces -------------------------------------------------


def check_leaky(predicates: TracePredicateSet, code: Program, trace: Trace, m0: Message) -> bool:
    """Some prefix of trace starts under pre, keeps side, and ends at a post label."""
    if predicates.mode is not Mode.SAFETY:
        raise ValueError("check_leaky needs a safety predicate set")
    entries = trace.entries
    if not entries or not predicates.pre(code, entries[0], m0):
        return False
    for entry in entries:
        if predicates.post(entry, m0):
            return True
        if not predicates.side(entry, m0):
            return False
    return False


def check_locking(predicates: TracePredicateSet, code: Program, traces: Sequence[Trace], m0: Message) -> bool:
    """pre holds and no element of any trace breaks side."""
    if predicates.mode is not Mode.LIVENESS:
        raise ValueError("check_locking needs a liveness predicate set")
    non_empty = [t for t in traces if t.entries]
    if not non_empty or not predicates.pre(code, non_empty[0].entries[0], m0):
        return False
    return all(predicates.side(e, m0) for t in non_empty for e in t.entries)


def posthumous(s: ChainState) -> List[int]:
    """Codeless accounts holding Ether."""
    return scan_posthumous(s)
