"""
Depth-first symbolic exploration of up to k invocations of one contract.

Each path runs the subject from pc 0 with symbolic message and block
inputs. A valid halt persists storage and balance, confirms the violations
the invocation flagged, and restarts at pc 0 for the next invocation. An
exceptional halt ends the path. Branches on symbolic conditions go to the
solver; everything concrete is folded without it.
"""

import hashlib
import logging
import time
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from tracehound.bytecode import Instruction, Program, contains_release_opcode
from tracehound.chainstate.state import BlockContext, ChainState, Message
from tracehound.config.settings import HARNESS_ADDRESS, AnalysisConfig, Category
from tracehound.errors import AnalysisTimeout, Halt, NotAContract, UnsupportedExpression
from tracehound.evm.interpreter import (
    DEFAULT_BLOCK_INTERVAL_S,
    GAS_REMAINING,
    IDENTITY_PRECOMPILE,
    MEMORY_LIMIT,
    PRECOMPILES,
    STACK_LIMIT,
    HaltKind,
)
from tracehound.evm.labels import Label, LabelKind
from tracehound.properties.predicates import (
    Mode,
    SymbolicContext,
    TracePredicateSet,
    greedy_classify,
    predicates_for,
)
from tracehound.smt.solver import CachingSolver, Sat, SolverSession, Unknown
from tracehound.symbolic.candidate import Candidate, EtherAcceptance, ExplorationResult, ExplorationStats
from tracehound.symbolic.expr import (
    ONE,
    ZERO,
    Const,
    Hash,
    SymValue,
    VarOrigin,
    const,
    evaluate,
    free_vars,
    mk,
    mk_hash,
    negate,
    replace_nodes,
    split_offset,
    truthy,
    var,
)
from tracehound.symbolic.inputs import ConcreteInputs, SymbolicInputs, schedule_blocks
from tracehound.symbolic.memory import Cell, SymMemory, word_cells
from tracehound.symbolic.state import PendingViolation, SymLabel, SymState
from tracehound.words import ADDRESS_MASK, BINARY_OPS, TERNARY_OPS, UNARY_OPS, WORD_BYTES

logger = logging.getLogger(__name__)

# Largest CALLVALUE offered when probing whether a contract accepts Ether.
ACCEPT_CHECK_MAX_WEI = 10**18


class SearchMode(str, Enum):
    SAFETY = "safety"
    LIVENESS = "liveness"
    ACCEPT = "accept"
    TRACE = "trace"


class _Prune(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


_Handler = Callable[["SymbolicEngine", SymState, Instruction], List[SymState]]


class SymbolicEngine:
    """
    One exploration over one subject. Owns a solver session unless one is
    passed in; `close()` (or the module-level helpers) releases it.
    """

    _handlers: Dict[str, _Handler] = {}

    def __init__(
        self,
        program: Program,
        start: ChainState,
        subject: int,
        cfg: AnalysisConfig,
        predicates: Optional[TracePredicateSet] = None,
        session: Optional[SolverSession] = None,
        inputs=None,
    ):
        self.program = program
        self.start = start
        self.subject = subject
        self.cfg = cfg
        self.predicates = predicates or predicates_for(cfg.category, cfg.invocation_depth)
        self.inputs = inputs or SymbolicInputs(start, cfg.calldata_cap)
        self.k = cfg.invocation_depth
        self.stats = ExplorationStats()
        self.candidates: List[Candidate] = []

        self._session = session
        self._owns_session = session is None
        self._solver: Optional[CachingSolver] = None
        self._mode = SearchMode.SAFETY
        self._deadline = float("inf")
        self._done = False
        self._incomplete = False
        self._memo: Dict[str, List[frozenset]] = {}
        self._restarts: Dict[str, List[Tuple[int, frozenset]]] = {}
        self._acceptance: Optional[EtherAcceptance] = None
        self._trace: Tuple[SymLabel, ...] = ()

        acct = start.get(subject)
        storage = acct.storage_image() if acct else []
        self.ctx = SymbolicContext(
            program=program,
            subject=subject,
            caller=self.inputs.caller(0),
            callvalues=[self.inputs.callvalue(i) for i in range(self.k)],
            storage_image=storage,
            contract_addresses=[a for a, other in start.items() if other.has_code],
            excluded_addresses=[HARNESS_ADDRESS],
        )

    # -- solver ---------------------------------------------------------------

    @property
    def solver(self) -> CachingSolver:
        if self._solver is None:
            if self._session is None:
                self._session = SolverSession(self.cfg.solver_path, self.cfg.solver_timeout_s)
            self._solver = CachingSolver(self._session, self.cfg.solver_timeout_s)
        return self._solver

    def close(self) -> None:
        if self._owns_session and self._session is not None:
            self._session.close()
        self._session = None
        self._solver = None

    # -- entry points ---------------------------------------------------------

    def explore(self) -> List[Candidate]:
        return self.explore_with_stats().candidates

    def explore_with_stats(self) -> ExplorationResult:
        if not self.start.is_contract(self.subject):
            raise NotAContract(self.subject)
        began = time.monotonic()
        self._deadline = began + self.cfg.max_analysis_time_s
        logger.info(
            "exploring 0x%040x for %s at depth %d", self.subject, self.predicates.category.value, self.k
        )
        skipped: Optional[str] = None
        try:
            if self.predicates.mode is Mode.LIVENESS:
                skipped = self._explore_greedy()
            else:
                pre = self.predicates.sym_pre(self.ctx)
                if pre is None:
                    skipped = "precondition"
                else:
                    self._mode = SearchMode.SAFETY
                    self._search(self._root(pre))
        except AnalysisTimeout:
            self.stats.budget_hit = True
            logger.warning("analysis budget of %ss exhausted", self.cfg.max_analysis_time_s)
        finally:
            if self._solver is not None:
                self.stats.solver_calls = self._solver.calls
            self.stats.elapsed_s = time.monotonic() - began
            self.close()
        logger.info(
            "explored %d paths, %d states, %d candidates in %.2fs",
            self.stats.paths_explored,
            self.stats.states_visited,
            len(self.candidates),
            self.stats.elapsed_s,
        )
        return ExplorationResult(
            candidates=list(self.candidates),
            stats=self.stats,
            incomplete=self.stats.budget_hit or self._incomplete,
            skipped=skipped,
        )

    def accepts_ether(self) -> EtherAcceptance:
        """Some single invocation with 0 < CALLVALUE reaches STOP or RETURN."""
        if self._deadline == float("inf"):
            self._deadline = time.monotonic() + self.cfg.max_analysis_time_s
        saved_k, saved_mode = self.k, self._mode
        self.k, self._mode, self._done = 1, SearchMode.ACCEPT, False
        self._acceptance = None
        cv = self.inputs.callvalue(0)
        root = self._root([mk("gt", cv, ZERO), negate(mk("gt", cv, const(ACCEPT_CHECK_MAX_WEI)))])
        try:
            self._search(root)
        except AnalysisTimeout:
            self.stats.budget_hit = True
            self._acceptance = EtherAcceptance(False, incomplete=True)
        finally:
            self.k, self._mode, self._done = saved_k, saved_mode, False
            self._memo.clear()
            self._restarts.clear()
        return self._acceptance or EtherAcceptance(False)

    def trace(self) -> List[Label]:
        """Run pinned inputs along their single path and return the concrete labels."""
        if not isinstance(self.inputs, ConcreteInputs):
            raise ValueError("tracing needs concrete inputs")
        self._mode = SearchMode.TRACE
        try:
            self._search(self._root([]))
        finally:
            self.close()
        return [lb.concrete(subject=self.subject) for lb in self._trace]

    # -- search ---------------------------------------------------------------

    def _root(self, pre: Sequence[SymValue]) -> SymState:
        balance = self.start.balance(self.subject)
        if balance == 0 and self._mode is not SearchMode.TRACE:
            balance = self.cfg.endowment_wei
        st = SymState(pc=0, stack=[], memory=SymMemory(), storage={}, balance=const(balance))
        if not self.inputs.concrete:
            st.constrain(mk("lt", self.inputs.caller(0), const(1 << 160)))
        st.constrain(*pre)
        return self._begin_invocation(st)

    def _begin_invocation(self, st: SymState) -> SymState:
        i = st.invocation
        st.entry_storage = dict(st.storage)
        st.entry_balance = st.balance
        st.constrain(*self.inputs.invocation_constraints(i))
        st.balance = mk("add", st.balance, self.inputs.callvalue(i))
        return st

    def _check_budget(self) -> None:
        if time.monotonic() > self._deadline:
            raise AnalysisTimeout(f"budget of {self.cfg.max_analysis_time_s}s exhausted")

    def _search(self, root: SymState) -> None:
        work = [root]
        while work and not self._done:
            self._check_budget()
            st = work.pop()
            if st.halt is not None:
                nxt = self._on_halt(st)
                if nxt is not None:
                    work.append(nxt)
                continue
            if self.cfg.memoize and self._mode is not SearchMode.TRACE and self._at_block_entry(st):
                if self._seen(st):
                    self._prune("memo")
                    continue
            self.stats.states_visited += 1
            work.extend(reversed(self.sym_step(st)))

    def _prune(self, reason: str) -> None:
        self.stats.prune(reason)
        if reason == "solver_unknown":
            # an abandoned undecided path leaves the search non-exhaustive
            self._incomplete = True
        logger.debug("pruned path: %s", reason)

    def _at_block_entry(self, st: SymState) -> bool:
        ins = self.program.at(st.pc)
        return ins is not None and ins.spec is not None and ins.spec.mnemonic == "JUMPDEST"

    def _on_halt(self, st: SymState) -> Optional[SymState]:
        if self._mode is SearchMode.TRACE:
            self._trace = st.labels
            if not st.halt.is_valid:
                st.storage = dict(st.entry_storage or {})
                st.balance = st.entry_balance
        elif not st.halt.is_valid:
            self.stats.paths_explored += 1
            self._prune(st.halt.value)
            return None
        elif self._mode is SearchMode.SAFETY:
            for pv in st.pending:
                self._confirm(st, pv)
                if self._done:
                    return None
        elif self._mode is SearchMode.LIVENESS:
            for pv in st.pending:
                if self._releases(st, pv):
                    self._done = True
                    return None
        elif self._mode is SearchMode.ACCEPT:
            if st.halt is not HaltKind.SUICIDE and self._accepting(st):
                self._done = True
                return None

        if st.halt is HaltKind.SUICIDE or st.invocation + 1 >= self.k:
            self.stats.paths_explored += 1
            return None
        return self._restart(st)

    def _restart(self, st: SymState) -> Optional[SymState]:
        nxt = st.fork()
        nxt.pc = 0
        nxt.stack = []
        nxt.memory = SymMemory()
        nxt.halt = None
        nxt.pending = ()
        nxt.cfg_nodes = 0
        nxt.call_depth = 0
        nxt.invocation += 1
        if self._mode in (SearchMode.SAFETY, SearchMode.LIVENESS) and self._restart_seen(nxt):
            self.stats.paths_explored += 1
            self._prune("memo")
            return None
        return self._begin_invocation(nxt)

    def _restart_seen(self, st: SymState) -> bool:
        """An earlier restart from the same concrete storage and balance had at least as many invocations left."""
        values = [st.balance] + [v for _, v in st.storage.values()]
        if not all(isinstance(v, Const) for v in values):
            return False
        key = self._storage_digest(st, with_balance=True)
        caller = self.inputs.caller(0)
        about_caller = frozenset(
            c.fp for c in st.constraints if any(v == caller for v in free_vars([c]))
        )
        seen = self._restarts.setdefault(key, [])
        for invocation, fps in seen:
            if invocation <= st.invocation and fps <= about_caller:
                return True
        seen.append((st.invocation, about_caller))
        return False

    # -- memoization ----------------------------------------------------------

    def _storage_digest(self, st: SymState, with_balance: bool = False) -> str:
        h = hashlib.blake2b(digest_size=16)
        acct = self.start.get(self.subject)
        for fp in sorted(st.storage):
            key, value = st.storage[fp]
            if isinstance(key, Const):
                original = acct.load(key.value) if acct else 0
                if isinstance(value, Const) and value.value == original:
                    continue
            elif value == ZERO:
                continue
            h.update(fp)
            h.update(value.fp)
        if with_balance:
            h.update(b"balance")
            h.update(st.balance.fp)
        return h.hexdigest()

    def memo_key(self, st: SymState) -> str:
        """Digest of storage, memory, stack, pc, invocation, balance and pending flags."""
        h = hashlib.blake2b(digest_size=16)
        h.update(self._storage_digest(st, with_balance=True).encode())
        st.memory.digest_into(h)
        h.update(b"stack")
        for v in st.stack:
            h.update(v.fp)
        h.update(st.pc.to_bytes(8, "big"))
        h.update(st.invocation.to_bytes(4, "big"))
        for pv in st.pending:
            h.update(pv.condition.fp)
        return h.hexdigest()

    def _seen(self, st: SymState) -> bool:
        records = self._memo.setdefault(self.memo_key(st), [])
        for fps in records:
            if fps <= st.cfps:
                return True
        records.append(st.cfps)
        return False

    # -- solver-backed decisions ----------------------------------------------

    def branch(self, st: SymState, cond: SymValue) -> List[Tuple[bool, SymState]]:
        """Feasible (outcome, state) pairs for a condition; the state carries the new constraint."""
        cond = self._pinned(st, cond)
        if isinstance(cond, Const):
            return [(cond.value != 0, st)]
        yes, no = truthy(cond), negate(cond)
        if yes.fp in st.cfps:
            return [(True, st)]
        if no.fp in st.cfps:
            return [(False, st)]
        sat_yes, decided_yes = self.solver.is_sat(st.constraints + (yes,))
        if not decided_yes:
            self._prune("solver_unknown")
            return []
        if not sat_yes:
            st.constrain(no)
            return [(False, st)]
        sat_no, decided_no = self.solver.is_sat(st.constraints + (no,))
        if not decided_no:
            self._prune("solver_unknown")
            return []
        out: List[Tuple[bool, SymState]] = []
        if sat_yes:
            s = st.fork() if sat_no else st
            s.constrain(yes)
            out.append((True, s))
        if sat_no:
            st.constrain(no)
            out.append((False, st))
        return out

    def resolve_dynamic_array(self, st: SymState, index_expr: SymValue) -> List[int]:
        """Up to array_bound distinct values index_expr can take below the calldata cap."""
        expr = self._pinned(st, index_expr)
        if isinstance(expr, Const):
            return [expr.value]
        in_range = mk("lt", expr, const(self.cfg.calldata_cap))
        found: List[int] = []
        for _ in range(self.cfg.array_bound):
            excluded = [negate(mk("eq", expr, const(w))) for w in found]
            result = self.solver.check(list(st.constraints) + [in_range] + excluded, want_model=True)
            if isinstance(result, Unknown):
                self._prune("solver_unknown")
            if not isinstance(result, Sat):
                break
            found.append(evaluate(expr, result.model))
        return found

    def _pin(self, st: SymState, expr: SymValue, value: int) -> None:
        term, offset = split_offset(expr)
        pinned = const(value - offset)
        st.pins[term.fp] = pinned
        st.constrain(mk("eq", term, pinned))

    def _pinned(self, st: SymState, v: SymValue) -> SymValue:
        if isinstance(v, Const) or not st.pins:
            return v
        return replace_nodes(v, st.pins)

    def _fork_values(self, st: SymState, v: SymValue) -> List[Tuple[SymState, int]]:
        v = self._pinned(st, v)
        if isinstance(v, Const):
            return [(st, v.value)]
        out = []
        for w in self.resolve_dynamic_array(st, v):
            s = st.fork()
            self._pin(s, v, w)
            out.append((s, w))
        if not out:
            self._prune("dynamic_array")
        return out

    def _feasible(self, st: SymState) -> bool:
        sat, decided = self.solver.is_sat(st.constraints)
        if not decided:
            self._prune("solver_unknown")
        return sat

    # -- violations -----------------------------------------------------------

    def _flag(self, st: SymState, label: SymLabel, balance_before: SymValue) -> None:
        st.emit(label)
        if self._mode is SearchMode.SAFETY:
            cond = self.predicates.sym_post(label, self.ctx)
            if isinstance(cond, Const) and cond.value == 0:
                return
            drain = None
            if label.kind is LabelKind.CALL:
                drain = mk("eq", label.value, balance_before)
            st.pending = st.pending + (PendingViolation(label, cond, drain),)
        elif self._mode is SearchMode.LIVENESS:
            cond = self.predicates.sym_side(label, self.ctx)
            if isinstance(cond, Const) and cond.value:
                return
            st.pending = st.pending + (PendingViolation(label, cond),)

    def _confirm(self, st: SymState, pv: PendingViolation) -> None:
        base = list(st.constraints) + [pv.condition]
        attempts = [base + [pv.drain]] if pv.drain is not None else []
        attempts.append(base)
        for constraints in attempts:
            result = self.solver.check(constraints, want_model=True)
            if isinstance(result, Sat):
                self.candidates.append(self._candidate(st, pv, result.model, constraints))
                logger.info("flagged %s", pv.label.describe(result.model))
                if len(self.candidates) >= self.cfg.max_candidates:
                    self._done = True
                return
            if isinstance(result, Unknown):
                self._prune("solver_unknown")

    def _releases(self, st: SymState, pv: PendingViolation) -> bool:
        result = self.solver.check(list(st.constraints) + [negate(pv.condition)])
        if isinstance(result, Unknown):
            self._prune("solver_unknown")
        return isinstance(result, Sat)

    def _accepting(self, st: SymState) -> bool:
        result = self.solver.check(st.constraints, want_model=True)
        if not isinstance(result, Sat):
            return False
        self._acceptance = EtherAcceptance(True, self.inputs.message(0, result.model, self.subject))
        return True

    def _candidate(
        self, st: SymState, pv: PendingViolation, model: Dict[str, int], constraints: Sequence[SymValue]
    ) -> Candidate:
        n = st.invocation + 1
        label = pv.label
        h = hashlib.blake2b(digest_size=16)
        for fp in sorted(c.fp for c in constraints):
            h.update(fp)
        return Candidate(
            category=self.predicates.category,
            subject=self.subject,
            messages=[self.inputs.message(i, model, self.subject) for i in range(n)],
            attacker=evaluate(self.inputs.caller(0), model) & ADDRESS_MASK,
            flagged_label=label.describe(model),
            label_kind=label.kind.value,
            beneficiary=evaluate(label.target, model) & ADDRESS_MASK if label.target is not None else None,
            path_digest=h.hexdigest(),
            block_schedule=[self.inputs.block_at(i, model) for i in range(n)],
            model_verified=all(evaluate(c, model) != 0 for c in constraints),
        )

    # -- greedy ---------------------------------------------------------------

    def _explore_greedy(self) -> Optional[str]:
        acceptance = self.accepts_ether()
        if not acceptance:
            self._incomplete = self._incomplete or acceptance.incomplete
            return "rejects_ether"
        if contains_release_opcode(self.program):
            self._mode = SearchMode.LIVENESS
            self._search(self._root(self.predicates.sym_pre(self.ctx) or []))
        else:
            logger.debug("no release instruction in the code; skipping the liveness search")
        if self._done:
            logger.info("found a release path; not greedy")
            return None
        kind = greedy_classify(self.program, True)
        notes = []
        if self.start.balance(self.subject) == 0:
            notes.append("subject holds no Ether in the snapshot; locking assumes it gets funded")
        self.candidates.append(
            Candidate(
                category=Category.GREEDY,
                subject=self.subject,
                attacker=acceptance.message.sender,
                flagged_label=f"no release within {self.k} invocations",
                path_digest=self.program.digest,
                model_verified=True,
                funding_message=acceptance.message,
                greedy_category=kind.value,
                exhaustive=not (self.stats.budget_hit or self._incomplete),
                confidence="low" if kind.value == "CategoryII" else "high",
                notes=notes,
            )
        )
        return None

    # -- stepping -------------------------------------------------------------

    def sym_step(self, st: SymState) -> List[SymState]:
        """Execute one instruction; returns the successor states (possibly none)."""
        ins = self.program.at(st.pc)
        if ins is None:
            st.halt = HaltKind.STOP if st.pc >= len(self.program.raw) else HaltKind.INVALID
            return [st]
        if ins.spec is None:
            st.halt = HaltKind.INVALID
            return [st]
        if not ins.spec.implemented:
            self._prune("unimplemented")
            return []
        handler = self._handlers.get(ins.spec.mnemonic)
        if handler is None:
            handler = self._generic_handler(ins.spec.mnemonic)
        try:
            return handler(self, st, ins)
        except Halt as halt:
            st.halt = halt.kind
            return [st]
        except _Prune as cut:
            self._prune(cut.reason)
            return []
        except UnsupportedExpression as exc:
            logger.debug("unsupported expression: %s", exc)
            self._prune("unsupported_expression")
            return []

    def _generic_handler(self, mnemonic: str) -> _Handler:
        if mnemonic.startswith("PUSH"):
            return SymbolicEngine._push
        if mnemonic.startswith("DUP"):
            return SymbolicEngine._dup
        if mnemonic.startswith("SWAP"):
            return SymbolicEngine._swap
        if mnemonic.startswith("LOG"):
            return SymbolicEngine._log
        name = mnemonic.lower()
        if name in UNARY_OPS or name in BINARY_OPS or name in TERNARY_OPS:
            return SymbolicEngine._alu
        raise _Prune("unimplemented")

    @staticmethod
    def _pop(st: SymState) -> SymValue:
        if not st.stack:
            raise Halt(HaltKind.INVALID, "stack underflow")
        return st.stack.pop()

    @staticmethod
    def _push_value(st: SymState, v: SymValue) -> None:
        if len(st.stack) >= STACK_LIMIT:
            raise Halt(HaltKind.INVALID, "stack overflow")
        st.stack.append(v)

    def _advance(self, st: SymState, ins: Instruction) -> List[SymState]:
        st.pc = self.program.next_offset(ins)
        return [st]

    def _offset(self, st: SymState, v: SymValue) -> int:
        v = self._pinned(st, v)
        if not isinstance(v, Const):
            raise _Prune("symbolic_memory")
        return v.value

    @staticmethod
    def _touch(offset: int, size: int) -> None:
        if size and offset + size > MEMORY_LIMIT:
            raise Halt(HaltKind.INVALID, "memory limit")

    def _push(self, st, ins):
        self._push_value(st, const(ins.push_value))
        return self._advance(st, ins)

    def _dup(self, st, ins):
        n = int(ins.spec.mnemonic[3:])
        if len(st.stack) < n:
            raise Halt(HaltKind.INVALID, "stack underflow")
        self._push_value(st, st.stack[-n])
        return self._advance(st, ins)

    def _swap(self, st, ins):
        n = int(ins.spec.mnemonic[4:])
        if len(st.stack) < n + 1:
            raise Halt(HaltKind.INVALID, "stack underflow")
        st.stack[-1], st.stack[-1 - n] = st.stack[-1 - n], st.stack[-1]
        return self._advance(st, ins)

    def _alu(self, st, ins):
        name = ins.spec.mnemonic.lower()
        args = [self._pop(st) for _ in range(ins.spec.pops)]
        self._push_value(st, mk(name, *args))
        return self._advance(st, ins)

    def _pop_op(self, st, ins):
        self._pop(st)
        return self._advance(st, ins)

    def _log(self, st, ins):
        for _ in range(ins.spec.pops):
            self._pop(st)
        return self._advance(st, ins)

    # -- environment ----------------------------------------------------------

    def _env(self, st, ins):
        m = ins.spec.mnemonic
        i = st.invocation
        if m == "ADDRESS":
            value = const(self.subject)
        elif m in ("ORIGIN", "CALLER"):
            value = self.inputs.caller(i)
        elif m == "CALLVALUE":
            value = self.inputs.callvalue(i)
        elif m == "CALLDATASIZE":
            value = self.inputs.calldatasize(i)
        elif m == "CODESIZE":
            value = const(len(self.program.raw))
        elif m == "COINBASE":
            value = const(self.start.block.coinbase)
        elif m == "TIMESTAMP":
            value = self.inputs.timestamp(i)
        elif m == "NUMBER":
            value = self.inputs.number(i)
        elif m == "PC":
            value = const(ins.offset)
        else:
            value = const(GAS_REMAINING)
        self._push_value(st, value)
        return self._advance(st, ins)

    def _balance(self, st, ins):
        addr = self._pinned(st, mk("and", self._pop(st), const(ADDRESS_MASK)))
        if isinstance(addr, Const):
            value = st.balance if addr.value == self.subject else const(self.start.balance(addr.value))
        else:
            value = var("bal_" + addr.fp.hex()[:16], VarOrigin.BALANCE)
        self._push_value(st, value)
        return self._advance(st, ins)

    def _extcodesize(self, st, ins):
        addr = self._pinned(st, mk("and", self._pop(st), const(ADDRESS_MASK)))
        if isinstance(addr, Const):
            value = const(len(self.start.code(addr.value)))
        else:
            value = var("ext_" + addr.fp.hex()[:16], VarOrigin.EXTERNAL_STATE)
        self._push_value(st, value)
        return self._advance(st, ins)

    def _blockhash(self, st, ins):
        self._push_value(st, self.inputs.blockhash(st.invocation, self._pinned(st, self._pop(st))))
        return self._advance(st, ins)

    def _calldataload(self, st, ins):
        raw = self._pop(st)
        fresh = not isinstance(self._pinned(st, raw), Const)
        out = []
        for s, offset in self._fork_values(st, raw):
            value, axioms = self.inputs.calldataload(s.invocation, offset)
            s.constrain(*axioms)
            if fresh:
                # a length read through a freshly pinned offset stays within the array bound
                s.constrain(negate(mk("gt", value, const(self.cfg.array_bound))))
                if not self._feasible(s):
                    continue
            self._push_value(s, value)
            out.extend(self._advance(s, ins))
        return out

    def _calldatacopy(self, st, ins):
        dest, offset, size = self._pop(st), self._pop(st), self._pop(st)
        out = []
        for s, off in self._fork_values(st, offset):
            for s2, n in self._fork_values(s, size):
                if n:
                    d = self._offset(s2, dest)
                    self._touch(d, n)
                    cells, axioms = self.inputs.calldata_cells(s2.invocation, off, n)
                    s2.constrain(*axioms)
                    s2.memory.store_cells(d, cells)
                out.extend(self._advance(s2, ins))
        return out

    # -- memory and storage ---------------------------------------------------

    def _mload(self, st, ins):
        offset = self._offset(st, self._pop(st))
        self._touch(offset, WORD_BYTES)
        self._push_value(st, st.memory.load_word(offset))
        return self._advance(st, ins)

    def _mstore(self, st, ins):
        offset = self._offset(st, self._pop(st))
        value = self._pop(st)
        self._touch(offset, WORD_BYTES)
        st.memory.store_word(offset, value)
        return self._advance(st, ins)

    def _mstore8(self, st, ins):
        offset = self._offset(st, self._pop(st))
        value = self._pop(st)
        self._touch(offset, 1)
        st.memory.store_byte(offset, value)
        return self._advance(st, ins)

    def _sha3(self, st, ins):
        offset = self._offset(st, self._pop(st))
        size = self._offset(st, self._pop(st))
        self._touch(offset, size)
        self._push_value(st, mk_hash(st.memory.load_words(offset, size), size))
        return self._advance(st, ins)

    def _storage_key(self, st: SymState, key: SymValue) -> SymValue:
        key = self._pinned(st, key)
        if isinstance(key, Const) or key.fp in st.storage:
            return key
        if _hash_based(key):
            return key
        raise _Prune("symbolic_storage")

    def _sload(self, st, ins):
        key = self._storage_key(st, self._pop(st))
        entry = st.storage.get(key.fp)
        if entry is not None:
            value = entry[1]
        elif isinstance(key, Const):
            acct = self.start.get(self.subject)
            value = const(acct.load(key.value) if acct else 0)
            st.storage[key.fp] = (key, value)
        else:
            value = ZERO
        self._push_value(st, value)
        st.emit(SymLabel(LabelKind.SLOAD, st.invocation, key=key, val=value))
        return self._advance(st, ins)

    def _sstore(self, st, ins):
        key = self._storage_key(st, self._pop(st))
        value = self._pop(st)
        st.storage[key.fp] = (key, value)
        st.emit(SymLabel(LabelKind.SSTORE, st.invocation, key=key, val=value))
        return self._advance(st, ins)

    # -- control flow ---------------------------------------------------------

    def _count_jump(self, st: SymState) -> None:
        st.cfg_nodes += 1
        if st.cfg_nodes > self.cfg.max_cfg_nodes:
            raise _Prune("cfg_nodes")

    def _jump_to(self, st: SymState, dest: SymValue) -> None:
        dest = self._pinned(st, dest)
        if not isinstance(dest, Const):
            raise _Prune("symbolic_jump")
        if dest.value not in self.program.jumpdests:
            raise Halt(HaltKind.INVALID, f"bad jump destination {dest.value}")
        st.pc = dest.value

    def _jump(self, st, ins):
        self._count_jump(st)
        self._jump_to(st, self._pop(st))
        return [st]

    def _jumpi(self, st, ins):
        self._count_jump(st)
        dest, cond = self._pop(st), self._pop(st)
        out = []
        for taken, s in self.branch(st, cond):
            if not taken:
                out.extend(self._advance(s, ins))
                continue
            try:
                self._jump_to(s, dest)
            except Halt as halt:
                s.halt = halt.kind
            except _Prune as cut:
                self._prune(cut.reason)
                continue
            out.append(s)
        return out

    def _jumpdest(self, st, ins):
        return self._advance(st, ins)

    def _stop(self, st, ins):
        st.halt = HaltKind.STOP
        return [st]

    def _return(self, st, ins):
        self._pop(st)
        self._pop(st)
        st.halt = HaltKind.RETURN
        return [st]

    def _revert(self, st, ins):
        raise Halt(HaltKind.REVERT, f"REVERT at {ins.offset}")

    def _invalid(self, st, ins):
        raise Halt(HaltKind.INVALID, f"INVALID at {ins.offset}")

    # -- calls and suicide ----------------------------------------------------

    def _enter_call(self, st: SymState) -> None:
        st.call_depth += 1
        if st.call_depth > self.cfg.max_call_depth:
            raise _Prune("call_depth")

    def _affordable(self, st: SymState, value: SymValue) -> Tuple[List[SymState], List[SymState]]:
        """(states that can cover value, states that halt for lack of funds)."""
        ok_states, broke = [], []
        for ok, s in self.branch(st, negate(mk("lt", st.balance, value))):
            if ok:
                ok_states.append(s)
            else:
                s.halt = HaltKind.INVALID
                broke.append(s)
        return ok_states, broke

    def _call_result(
        self, st: SymState, target: SymValue, in_off: int, in_size: int, out_off: int, out_size: int
    ) -> None:
        if isinstance(target, Const) and not self.start.is_contract(target.value):
            if target.value in PRECOMPILES:
                if target.value != IDENTITY_PRECOMPILE:
                    raise Halt(HaltKind.INVALID, f"unsupported precompile 0x{target.value:x}")
                n = min(in_size, out_size)
                if n:
                    st.memory.store_cells(out_off, st.memory.load_cells(in_off, n))
            self._push_value(st, ONE)
            return
        # the callee is not simulated: its success flag and output are unknown
        ret = var(st.next_name("ret"), VarOrigin.EXTERNAL_CALL_RETURN)
        st.constrain(mk("lt", ret, const(2)))
        if out_size:
            words: List[Cell] = []
            while len(words) < out_size:
                words.extend(word_cells(var(st.next_name("rd"), VarOrigin.EXTERNAL_CALL_RETURN)))
            st.memory.store_cells(out_off, words[:out_size])
        self._push_value(st, ret)

    def _memory_args(self, st: SymState) -> Tuple[int, int, int, int]:
        in_off, in_size = self._pop(st), self._pop(st)
        out_off, out_size = self._pop(st), self._pop(st)
        in_size_v = self._offset(st, in_size)
        out_size_v = self._offset(st, out_size)
        in_off_v = self._offset(st, in_off) if in_size_v else 0
        out_off_v = self._offset(st, out_off) if out_size_v else 0
        self._touch(in_off_v, in_size_v)
        self._touch(out_off_v, out_size_v)
        return in_off_v, in_size_v, out_off_v, out_size_v

    def _call(self, st, ins):
        self._enter_call(st)
        self._pop(st)
        target = self._pinned(st, mk("and", self._pop(st), const(ADDRESS_MASK)))
        value = self._pinned(st, self._pop(st))
        args = self._memory_args(st)
        funded, out = self._affordable(st, value)
        for s in funded:
            before = s.balance
            s.balance = mk("sub", s.balance, value)
            if isinstance(target, Const) and target.value == self.subject:
                s.balance = before
            self._flag(s, SymLabel(LabelKind.CALL, s.invocation, target=target, value=value), before)
            self._call_result(s, target, *args)
            out.extend(self._advance(s, ins))
        return out

    def _callcode(self, st, ins):
        self._enter_call(st)
        self._pop(st)
        target = self._pinned(st, mk("and", self._pop(st), const(ADDRESS_MASK)))
        value = self._pinned(st, self._pop(st))
        args = self._memory_args(st)
        funded, out = self._affordable(st, value)
        for s in funded:
            self._flag(s, SymLabel(LabelKind.DELEGATECALL, s.invocation, target=target), s.balance)
            self._call_result(s, target, *args)
            out.extend(self._advance(s, ins))
        return out

    def _delegatecall(self, st, ins):
        self._enter_call(st)
        self._pop(st)
        target = self._pinned(st, mk("and", self._pop(st), const(ADDRESS_MASK)))
        args = self._memory_args(st)
        self._flag(st, SymLabel(LabelKind.DELEGATECALL, st.invocation, target=target), st.balance)
        self._call_result(st, target, *args)
        return self._advance(st, ins)

    def _suicide(self, st, ins):
        target = self._pinned(st, mk("and", self._pop(st), const(ADDRESS_MASK)))
        before = st.balance
        if not (isinstance(target, Const) and target.value == self.subject):
            st.balance = ZERO
        self._flag(st, SymLabel(LabelKind.SUICIDE, st.invocation, target=target, value=before), before)
        st.halt = HaltKind.SUICIDE
        return [st]


def _hash_based(key: SymValue) -> bool:
    """Mapping slots: a hash, or a constant offset from one."""
    term, _ = split_offset(key)
    return isinstance(term, Hash)


SymbolicEngine._handlers = {
    "STOP": SymbolicEngine._stop,
    "POP": SymbolicEngine._pop_op,
    "ADDRESS": SymbolicEngine._env,
    "ORIGIN": SymbolicEngine._env,
    "CALLER": SymbolicEngine._env,
    "CALLVALUE": SymbolicEngine._env,
    "CALLDATASIZE": SymbolicEngine._env,
    "CODESIZE": SymbolicEngine._env,
    "COINBASE": SymbolicEngine._env,
    "TIMESTAMP": SymbolicEngine._env,
    "NUMBER": SymbolicEngine._env,
    "PC": SymbolicEngine._env,
    "GAS": SymbolicEngine._env,
    "BALANCE": SymbolicEngine._balance,
    "EXTCODESIZE": SymbolicEngine._extcodesize,
    "BLOCKHASH": SymbolicEngine._blockhash,
    "CALLDATALOAD": SymbolicEngine._calldataload,
    "CALLDATACOPY": SymbolicEngine._calldatacopy,
    "MLOAD": SymbolicEngine._mload,
    "MSTORE": SymbolicEngine._mstore,
    "MSTORE8": SymbolicEngine._mstore8,
    "SHA3": SymbolicEngine._sha3,
    "SLOAD": SymbolicEngine._sload,
    "SSTORE": SymbolicEngine._sstore,
    "JUMP": SymbolicEngine._jump,
    "JUMPI": SymbolicEngine._jumpi,
    "JUMPDEST": SymbolicEngine._jumpdest,
    "RETURN": SymbolicEngine._return,
    "REVERT": SymbolicEngine._revert,
    "INVALID": SymbolicEngine._invalid,
    "CALL": SymbolicEngine._call,
    "CALLCODE": SymbolicEngine._callcode,
    "DELEGATECALL": SymbolicEngine._delegatecall,
    "SUICIDE": SymbolicEngine._suicide,
}


# -- module-level helpers -----------------------------------------------------


def explore_with_stats(
    program: Program,
    start: ChainState,
    subject: int,
    cfg: AnalysisConfig,
    predicates: Optional[TracePredicateSet] = None,
    session: Optional[SolverSession] = None,
) -> ExplorationResult:
    return SymbolicEngine(program, start, subject, cfg, predicates, session).explore_with_stats()


def explore(program: Program, start: ChainState, subject: int, cfg: AnalysisConfig) -> List[Candidate]:
    """Candidates for cfg.category within cfg's bounds (partial on budget expiry)."""
    return explore_with_stats(program, start, subject, cfg).candidates


def trace_concrete(
    program: Program,
    start: ChainState,
    subject: int,
    msgs: Sequence[Message],
    blocks: Optional[Sequence[Optional[BlockContext]]] = None,
    block_interval_s: int = DEFAULT_BLOCK_INTERVAL_S,
    cfg: Optional[AnalysisConfig] = None,
) -> List[Label]:
    """
    Labels the engine emits when every input is pinned to msgs, scheduled
    over blocks exactly as `run_sequence` would; Internal labels are not
    produced.
    """
    if not msgs:
        return []
    schedule = schedule_blocks(start.block, len(msgs), blocks, block_interval_s)
    base = cfg or AnalysisConfig()
    cfg = base.model_copy(
        update={"invocation_depth": max(1, len(msgs)), "max_cfg_nodes": 100_000, "memoize": False}
    )
    inputs = ConcreteInputs(msgs, schedule)
    return SymbolicEngine(program, start, subject, cfg, inputs=inputs).trace()
