"""
Concrete validation of symbolic candidates.

Every check replays the candidate's messages on a private fork of the
starting state; the state handed in is never touched. The harness account
is the only source of new Ether inside a fork.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

from tracehound.bytecode import Program, contains_release_opcode, decode
from tracehound.chainstate.state import BlockContext, ChainState, Message, fork, format_address, total_balance
from tracehound.config.settings import Category, ReplayMode, ValidationConfig
from tracehound.evm.interpreter import HaltKind, Interpreter
from tracehound.evm.labels import Call, Suicide, Trace
from tracehound.properties.predicates import GreedyCategory, check_leaky, prodigal_predicates
from tracehound.symbolic.candidate import Candidate

logger = logging.getLogger(__name__)


class VerdictStatus(str, Enum):
    TRUE_POSITIVE = "TruePositive"
    FALSE_POSITIVE = "FalsePositive"
    NOT_VALIDATABLE = "NotValidatable"


@dataclass
class Verdict:
    """Outcome of replaying one candidate."""

    candidate: Candidate
    status: VerdictStatus
    reason: str = ""
    attacker_balance_delta: Optional[int] = None
    code_cleared: Optional[bool] = None
    accepts_and_no_release: Optional[bool] = None
    replay_mode: Optional[str] = None
    conservation_ok: bool = True
    halts: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def is_true_positive(self) -> bool:
        return self.status is VerdictStatus.TRUE_POSITIVE

    def to_dict(self) -> Dict[str, Any]:
        return {
            "category": self.candidate.category.value,
            "subject": format_address(self.candidate.subject),
            "status": self.status.value,
            "reason": self.reason,
            "evidence": {
                "attacker_balance_delta": self.attacker_balance_delta,
                "code_cleared": self.code_cleared,
                "accepts_and_no_release": self.accepts_and_no_release,
            },
            "replay_mode": self.replay_mode,
            "conservation_ok": self.conservation_ok,
            "halts": list(self.halts),
            "notes": list(self.notes),
            "path_digest": self.candidate.path_digest,
        }


@dataclass
class Sandbox:
    """A private fork and the Ether the harness put into it."""

    state: ChainState
    minted: int = 0

    def fund(self, address: int, value: int) -> None:
        self.state.mint(address, value)
        self.minted += value

    def conserved(self, after: ChainState) -> bool:
        ok = total_balance(after) == total_balance(self.state)
        if not ok:
            logger.error("balance total changed during replay")
        return ok


def open_sandbox(start: ChainState, subject: int, config: ValidationConfig) -> Sandbox:
    """Fork start; an empty subject gets the endowment through the harness account."""
    sandbox = Sandbox(fork(start))
    if sandbox.state.balance(subject) == 0:
        sandbox.fund(config.harness_address, config.endowment_wei)
        sandbox.state.transfer(config.harness_address, subject, config.endowment_wei)
        logger.debug("funded 0x%040x with %d wei", subject, config.endowment_wei)
    return sandbox


def replay_blocks(
    start: ChainState, c: Candidate, mode: ReplayMode
) -> Tuple[Optional[List[Optional[BlockContext]]], str]:
    """
    Blocks to pin for each message and the mode actually used. AUTO takes
    the solver's block values when they all lie beyond the snapshot block.
    """
    if mode is ReplayMode.SNAPSHOT or not c.block_schedule:
        return None, ReplayMode.SNAPSHOT.value
    base = start.block
    beyond = all(n > base.number and t > base.timestamp for n, t in c.block_schedule)
    if mode is ReplayMode.AUTO and not beyond:
        return None, ReplayMode.SNAPSHOT.value
    return [base.at(n, t) for n, t in c.block_schedule], ReplayMode.MODEL.value


class BaseValidator(ABC):
    """One category's concrete check."""

    category: Category

    def __init__(self, config: Optional[ValidationConfig] = None):
        self.config = config or ValidationConfig()
        self.interpreter = Interpreter(self.config.step_limit)

    def validate(self, start: ChainState, c: Candidate) -> Verdict:
        if c.category is not self.category:
            raise ValueError(f"{type(self).__name__} cannot validate a {c.category.value} candidate")
        if not start.is_contract(c.subject):
            return Verdict(
                c,
                VerdictStatus.NOT_VALIDATABLE,
                reason="subject has no code in the snapshot; supply one where it is alive",
            )
        return self._validate(start, c)

    @abstractmethod
    def _validate(self, start: ChainState, c: Candidate) -> Verdict:
        ...

    def _replay(self, sandbox: Sandbox, c: Candidate, msgs: Sequence[Message]) -> Tuple[ChainState, Trace, str]:
        blocks, mode = replay_blocks(sandbox.state, c, self.config.replay_mode)
        after, trace = self.interpreter.run_sequence(sandbox.state, msgs, blocks, self.config.block_interval_s)
        return after, trace, mode

    @staticmethod
    def _messages(sandbox: Sandbox, c: Candidate) -> List[Message]:
        """The candidate's messages, sent by the attacker, who is funded for any value they carry."""
        msgs = [Message(c.attacker, m.value, m.data, c.subject) for m in c.messages]
        needed = sum(m.value for m in msgs)
        if needed:
            sandbox.fund(c.attacker, needed)
        return msgs


class ProdigalValidator(BaseValidator):
    """The attacker's balance must strictly grow."""

    category = Category.PRODIGAL

    def _validate(self, start: ChainState, c: Candidate) -> Verdict:
        if not c.messages:
            return Verdict(c, VerdictStatus.FALSE_POSITIVE, reason="no messages to replay", attacker_balance_delta=0)
        sandbox = open_sandbox(start, c.subject, self.config)
        msgs = self._messages(sandbox, c)
        before = sandbox.state.balance(c.attacker)
        after, trace, mode = self._replay(sandbox, c, msgs)
        delta = after.balance(c.attacker) - before
        verdict = Verdict(
            c,
            VerdictStatus.TRUE_POSITIVE if delta > 0 else VerdictStatus.FALSE_POSITIVE,
            attacker_balance_delta=delta,
            replay_mode=mode,
            conservation_ok=sandbox.conserved(after),
            halts=[h.value for h in trace.halts if h is not None],
        )
        if delta > 0:
            verdict.reason = "attacker received Ether"
            program = decode(start.code(c.subject))
            if not check_leaky(prodigal_predicates(), program, trace, msgs[0]):
                verdict.notes.append("balance grew without a flagged label in the replayed trace")
            return verdict
        verdict.reason = "attacker balance did not grow"
        for label in trace.significant():
            if isinstance(label, Call) and label.msg.value > 0 and label.target != c.attacker:
                verdict.notes.append(f"leaks {label.msg.value} wei to {format_address(label.target)}, not the sender")
            elif isinstance(label, Suicide) and label.beneficiary != c.attacker:
                verdict.notes.append(f"suicide pays {format_address(label.beneficiary)}, not the sender")
        return verdict


class SuicidalValidator(BaseValidator):
    """The subject's code must read empty after the replay."""

    category = Category.SUICIDAL

    def _validate(self, start: ChainState, c: Candidate) -> Verdict:
        if not c.messages:
            return Verdict(c, VerdictStatus.FALSE_POSITIVE, reason="no messages to replay", code_cleared=False)
        sandbox = open_sandbox(start, c.subject, self.config)
        msgs = self._messages(sandbox, c)
        after, trace, mode = self._replay(sandbox, c, msgs)
        cleared = not after.is_contract(c.subject)
        return Verdict(
            c,
            VerdictStatus.TRUE_POSITIVE if cleared else VerdictStatus.FALSE_POSITIVE,
            reason="code cleared" if cleared else "subject still has code",
            code_cleared=cleared,
            replay_mode=mode,
            conservation_ok=sandbox.conserved(after),
            halts=[h.value for h in trace.halts if h is not None],
        )


class GreedyValidator(BaseValidator):
    """Ether must be accepted and the code must hold no release instruction."""

    category = Category.GREEDY

    def _validate(self, start: ChainState, c: Candidate) -> Verdict:
        program: Program = decode(start.code(c.subject))
        if c.greedy_category == GreedyCategory.CATEGORY_II.value or contains_release_opcode(program):
            return Verdict(
                c,
                VerdictStatus.NOT_VALIDATABLE,
                reason="release instructions present; requires manual analysis",
                accepts_and_no_release=False,
            )
        funding = c.funding_message
        value = funding.value if funding and funding.value else self.config.endowment_wei
        data = funding.data if funding else b""
        sandbox = open_sandbox(start, c.subject, self.config)
        sender = self.config.harness_address
        sandbox.fund(sender, value)
        before = sandbox.state.balance(c.subject)
        block = sandbox.state.block.advance(1, self.config.block_interval_s)
        after, _, halt = self.interpreter.run_transaction(sandbox.state, Message(sender, value, data, c.subject), block)
        accepted = halt.is_valid and halt is not HaltKind.SUICIDE and after.balance(c.subject) > before
        return Verdict(
            c,
            VerdictStatus.TRUE_POSITIVE if accepted else VerdictStatus.FALSE_POSITIVE,
            reason="accepts Ether and cannot release it" if accepted else f"transfer not accepted ({halt.value})",
            accepts_and_no_release=accepted,
            replay_mode=ReplayMode.SNAPSHOT.value,
            conservation_ok=sandbox.conserved(after),
            halts=[halt.value],
        )


_VALIDATORS = {
    Category.PRODIGAL: ProdigalValidator,
    Category.SUICIDAL: SuicidalValidator,
    Category.GREEDY: GreedyValidator,
}


def validator_for(category: Category, config: Optional[ValidationConfig] = None) -> BaseValidator:
    return _VALIDATORS[category](config)


def validate_prodigal(start: ChainState, c: Candidate, config: Optional[ValidationConfig] = None) -> Verdict:
    return ProdigalValidator(config).validate(start, c)


def validate_suicidal(start: ChainState, c: Candidate, config: Optional[ValidationConfig] = None) -> Verdict:
    return SuicidalValidator(config).validate(start, c)


def validate_greedy(start: ChainState, c: Candidate, config: Optional[ValidationConfig] = None) -> Verdict:
    return GreedyValidator(config).validate(start, c)
