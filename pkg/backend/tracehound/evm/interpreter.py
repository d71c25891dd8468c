"""
Small-step concrete interpreter with labeled transitions.

A Configuration is a stack of activation records over a ChainState. `step`
applies exactly one instruction of the top record and returns the label of
that transition. Exceptional halts raise `Halt`; `run_transaction` turns
them into a full rollback of the transaction.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from eth_utils import keccak

from tracehound.bytecode import Instruction, Program, decode
from tracehound.chainstate.state import BlockContext, ChainState, Message, blockhash, fork
from tracehound.errors import Halt, NotAContract
from tracehound.evm.labels import INTERNAL, Call, ContractView, DelegateCall, Label, SLoad, SStore, Suicide, Trace
from tracehound.words import (
    ADDRESS_MASK,
    BINARY_OPS,
    TERNARY_OPS,
    UINT256_MASK,
    UNARY_OPS,
    WORD_BYTES,
    bytes_to_word,
    word_to_bytes,
)

logger = logging.getLogger(__name__)

STACK_LIMIT = 1024
CALL_DEPTH_LIMIT = 1024
MEMORY_LIMIT = 1 << 20
DEFAULT_STEP_LIMIT = 1_000_000
DEFAULT_BLOCK_INTERVAL_S = 15
# No gas model: GAS always reports this much remaining.
GAS_REMAINING = 10_000_000
IDENTITY_PRECOMPILE = 0x04
PRECOMPILES = range(1, 9)


class HaltKind(str, Enum):
    STOP = "stop"
    RETURN = "return"
    SUICIDE = "suicide"
    REVERT = "revert"
    INVALID = "invalid"
    STEP_LIMIT = "step_limit"

    @property
    def is_valid(self) -> bool:
        return self in (HaltKind.STOP, HaltKind.RETURN, HaltKind.SUICIDE)


@dataclass
class ActivationRecord:
    code: Program
    id: int
    pc: int
    stack: List[int]
    mem: bytearray
    msg: Message
    ret_offset: int = 0
    ret_size: int = 0

    def pop(self) -> int:
        if not self.stack:
            raise Halt(HaltKind.INVALID, "stack underflow")
        return self.stack.pop()

    def push(self, value: int) -> None:
        if len(self.stack) >= STACK_LIMIT:
            raise Halt(HaltKind.INVALID, "stack overflow")
        self.stack.append(value & UINT256_MASK)

    def _expand(self, offset: int, size: int) -> None:
        if size == 0:
            return
        end = offset + size
        if end > MEMORY_LIMIT:
            raise Halt(HaltKind.INVALID, "memory limit")
        if end > len(self.mem):
            words = (end + WORD_BYTES - 1) // WORD_BYTES
            self.mem.extend(b"\x00" * (words * WORD_BYTES - len(self.mem)))

    def mread(self, offset: int, size: int) -> bytes:
        self._expand(offset, size)
        return bytes(self.mem[offset: offset + size])

    def mwrite(self, offset: int, data: bytes) -> None:
        self._expand(offset, len(data))
        self.mem[offset: offset + len(data)] = data


@dataclass
class Configuration:
    records: List[ActivationRecord]
    chain: ChainState
    origin: int
    halt: Optional[HaltKind] = None
    output: bytes = b""

    @property
    def done(self) -> bool:
        return not self.records

    @property
    def top(self) -> ActivationRecord:
        return self.records[-1]


_Handler = Callable[["Interpreter", Configuration, ActivationRecord, Instruction], Label]


class Interpreter:
    """Executes instructions against a Configuration; one instance per fork."""

    _handlers: Dict[str, _Handler] = {}

    def __init__(self, step_limit: int = DEFAULT_STEP_LIMIT):
        self.step_limit = step_limit
        self._programs: Dict[bytes, Program] = {}

    def program(self, code: bytes) -> Program:
        prog = self._programs.get(code)
        if prog is None:
            prog = decode(code)
            self._programs[code] = prog
        return prog

    # -- single step -------------------------------------------------------

    def step(self, c: Configuration) -> Tuple[Configuration, Label]:
        """Apply one transition to the top record; c is advanced in place."""
        rec = c.top
        ins = rec.code.at(rec.pc)
        if ins is None:
            if rec.pc >= len(rec.code.raw):
                return c, self._finish(c, b"", HaltKind.STOP)
            raise Halt(HaltKind.INVALID, f"pc {rec.pc} is not an instruction boundary")
        if ins.spec is None:
            raise Halt(HaltKind.INVALID, f"invalid opcode 0x{ins.byte:02x} at {ins.offset}")
        if not ins.spec.implemented:
            raise Halt(HaltKind.INVALID, f"unimplemented opcode {ins.spec.mnemonic} at {ins.offset}")
        handler = self._handlers.get(ins.spec.mnemonic)
        if handler is None:
            handler = self._generic_handler(ins.spec.mnemonic)
        return c, handler(self, c, rec, ins)

    def _generic_handler(self, mnemonic: str) -> _Handler:
        if mnemonic.startswith("PUSH"):
            return Interpreter._push
        if mnemonic.startswith("DUP"):
            return Interpreter._dup
        if mnemonic.startswith("SWAP"):
            return Interpreter._swap
        if mnemonic.startswith("LOG"):
            return Interpreter._log
        name = mnemonic.lower()
        if name in UNARY_OPS or name in BINARY_OPS or name in TERNARY_OPS:
            return Interpreter._alu
        raise Halt(HaltKind.INVALID, f"no semantics for {mnemonic}")

    @staticmethod
    def _advance(rec: ActivationRecord, ins: Instruction) -> None:
        rec.pc = ins.offset + ins.size

    # -- stack and arithmetic ---------------------------------------------

    def _push(self, c, rec, ins):
        rec.push(ins.push_value)
        self._advance(rec, ins)
        return INTERNAL

    def _dup(self, c, rec, ins):
        n = int(ins.spec.mnemonic[3:])
        if len(rec.stack) < n:
            raise Halt(HaltKind.INVALID, "stack underflow")
        rec.push(rec.stack[-n])
        self._advance(rec, ins)
        return INTERNAL

    def _swap(self, c, rec, ins):
        n = int(ins.spec.mnemonic[4:])
        if len(rec.stack) < n + 1:
            raise Halt(HaltKind.INVALID, "stack underflow")
        rec.stack[-1], rec.stack[-1 - n] = rec.stack[-1 - n], rec.stack[-1]
        self._advance(rec, ins)
        return INTERNAL

    def _alu(self, c, rec, ins):
        name = ins.spec.mnemonic.lower()
        if name in UNARY_OPS:
            rec.push(UNARY_OPS[name](rec.pop()))
        elif name in BINARY_OPS:
            a = rec.pop()
            b = rec.pop()
            rec.push(BINARY_OPS[name](a, b))
        else:
            a, b, n = rec.pop(), rec.pop(), rec.pop()
            rec.push(TERNARY_OPS[name](a, b, n))
        self._advance(rec, ins)
        return INTERNAL

    def _pop_op(self, c, rec, ins):
        rec.pop()
        self._advance(rec, ins)
        return INTERNAL

    def _log(self, c, rec, ins):
        for _ in range(ins.spec.pops):
            rec.pop()
        self._advance(rec, ins)
        return INTERNAL

    # -- environment --------------------------------------------------------

    def _env(self, c, rec, ins):
        m = ins.spec.mnemonic
        block = c.chain.block
        if m == "ADDRESS":
            value = rec.id
        elif m == "ORIGIN":
            value = c.origin
        elif m == "CALLER":
            value = rec.msg.sender
        elif m == "CALLVALUE":
            value = rec.msg.value
        elif m == "CALLDATASIZE":
            value = len(rec.msg.data)
        elif m == "CODESIZE":
            value = len(rec.code.raw)
        elif m == "COINBASE":
            value = block.coinbase
        elif m == "TIMESTAMP":
            value = block.timestamp
        elif m == "NUMBER":
            value = block.number
        elif m == "PC":
            value = ins.offset
        elif m == "GAS":
            value = GAS_REMAINING
        else:
            raise Halt(HaltKind.INVALID, f"no semantics for {m}")
        rec.push(value)
        self._advance(rec, ins)
        return INTERNAL

    def _balance(self, c, rec, ins):
        rec.push(c.chain.balance(rec.pop() & ADDRESS_MASK))
        self._advance(rec, ins)
        return INTERNAL

    def _extcodesize(self, c, rec, ins):
        rec.push(len(c.chain.code(rec.pop() & ADDRESS_MASK)))
        self._advance(rec, ins)
        return INTERNAL

    def _blockhash(self, c, rec, ins):
        rec.push(blockhash(c.chain.block, rec.pop()))
        self._advance(rec, ins)
        return INTERNAL

    def _calldataload(self, c, rec, ins):
        offset = rec.pop()
        data = rec.msg.data
        rec.push(bytes_to_word(data[offset: offset + WORD_BYTES]) if offset < len(data) else 0)
        self._advance(rec, ins)
        return INTERNAL

    def _calldatacopy(self, c, rec, ins):
        dest, offset, size = rec.pop(), rec.pop(), rec.pop()
        if size:
            chunk = rec.msg.data[offset: offset + size] if offset < len(rec.msg.data) else b""
            rec.mwrite(dest, chunk + b"\x00" * (size - len(chunk)))
        self._advance(rec, ins)
        return INTERNAL

    # -- memory and storage -------------------------------------------------

    def _mload(self, c, rec, ins):
        rec.push(int.from_bytes(rec.mread(rec.pop(), WORD_BYTES), "big"))
        self._advance(rec, ins)
        return INTERNAL

    def _mstore(self, c, rec, ins):
        offset, value = rec.pop(), rec.pop()
        rec.mwrite(offset, word_to_bytes(value))
        self._advance(rec, ins)
        return INTERNAL

    def _mstore8(self, c, rec, ins):
        offset, value = rec.pop(), rec.pop()
        rec.mwrite(offset, bytes([value & 0xFF]))
        self._advance(rec, ins)
        return INTERNAL

    def _sha3(self, c, rec, ins):
        offset, size = rec.pop(), rec.pop()
        rec.push(int.from_bytes(keccak(rec.mread(offset, size)), "big"))
        self._advance(rec, ins)
        return INTERNAL

    def _sload(self, c, rec, ins):
        key = rec.pop()
        val = c.chain.account(rec.id).load(key)
        rec.push(val)
        self._advance(rec, ins)
        return SLoad(key, val)

    def _sstore(self, c, rec, ins):
        key, val = rec.pop(), rec.pop()
        c.chain.account(rec.id).store(key, val)
        self._advance(rec, ins)
        return SStore(key, val)

    # -- control flow -------------------------------------------------------

    def _jump_to(self, rec: ActivationRecord, dest: int) -> None:
        if dest not in rec.code.jumpdests:
            raise Halt(HaltKind.INVALID, f"bad jump destination {dest}")
        rec.pc = dest

    def _jump(self, c, rec, ins):
        self._jump_to(rec, rec.pop())
        return INTERNAL

    def _jumpi(self, c, rec, ins):
        dest, cond = rec.pop(), rec.pop()
        if cond:
            self._jump_to(rec, dest)
        else:
            self._advance(rec, ins)
        return INTERNAL

    def _jumpdest(self, c, rec, ins):
        self._advance(rec, ins)
        return INTERNAL

    def _stop(self, c, rec, ins):
        return self._finish(c, b"", HaltKind.STOP)

    def _return(self, c, rec, ins):
        offset, size = rec.pop(), rec.pop()
        return self._finish(c, rec.mread(offset, size), HaltKind.RETURN)

    def _revert(self, c, rec, ins):
        raise Halt(HaltKind.REVERT, f"REVERT at {ins.offset}")

    def _invalid(self, c, rec, ins):
        raise Halt(HaltKind.INVALID, f"INVALID at {ins.offset}")

    def _finish(self, c: Configuration, output: bytes, kind: HaltKind) -> Label:
        """Pop the top record; hand output and success to the caller if there is one."""
        rec = c.records.pop()
        if not c.records:
            c.halt = kind
            c.output = output
            return INTERNAL
        caller = c.top
        if rec.ret_size and output:
            caller.mwrite(rec.ret_offset, output[: rec.ret_size])
        caller.push(1)
        return INTERNAL

    # -- calls and suicide --------------------------------------------------

    def _enter(self, c: Configuration, code: bytes, ctx_id: int, msg: Message, out_offset: int, out_size: int) -> None:
        if len(c.records) >= CALL_DEPTH_LIMIT:
            raise Halt(HaltKind.INVALID, "call depth limit")
        c.records.append(ActivationRecord(self.program(code), ctx_id, 0, [], bytearray(), msg, out_offset, out_size))

    def _call(self, c, rec, ins):
        _gas, to, value = rec.pop(), rec.pop() & ADDRESS_MASK, rec.pop()
        in_off, in_size, out_off, out_size = rec.pop(), rec.pop(), rec.pop(), rec.pop()
        if c.chain.balance(rec.id) < value:
            raise Halt(HaltKind.INVALID, "insufficient balance for CALL")
        data = rec.mread(in_off, in_size)
        self._advance(rec, ins)
        msg = Message(rec.id, value, data, to)
        c.chain.transfer(rec.id, to, value)
        label = Call(to, msg)
        if to in PRECOMPILES and not c.chain.is_contract(to):
            self._precompile(rec, to, data, out_off, out_size)
        elif c.chain.is_contract(to):
            self._enter(c, c.chain.code(to), to, msg, out_off, out_size)
        else:
            rec.push(1)
        return label

    def _callcode(self, c, rec, ins):
        _gas, to, value = rec.pop(), rec.pop() & ADDRESS_MASK, rec.pop()
        in_off, in_size, out_off, out_size = rec.pop(), rec.pop(), rec.pop(), rec.pop()
        if c.chain.balance(rec.id) < value:
            raise Halt(HaltKind.INVALID, "insufficient balance for CALLCODE")
        data = rec.mread(in_off, in_size)
        self._advance(rec, ins)
        if to in PRECOMPILES and not c.chain.is_contract(to):
            self._precompile(rec, to, data, out_off, out_size)
        elif c.chain.is_contract(to):
            self._enter(c, c.chain.code(to), rec.id, Message(rec.id, value, data, rec.id), out_off, out_size)
        else:
            rec.push(1)
        return DelegateCall(to)

    def _delegatecall(self, c, rec, ins):
        _gas, to = rec.pop(), rec.pop() & ADDRESS_MASK
        in_off, in_size, out_off, out_size = rec.pop(), rec.pop(), rec.pop(), rec.pop()
        data = rec.mread(in_off, in_size)
        self._advance(rec, ins)
        if to in PRECOMPILES and not c.chain.is_contract(to):
            self._precompile(rec, to, data, out_off, out_size)
        elif c.chain.is_contract(to):
            msg = Message(rec.msg.sender, rec.msg.value, data, rec.id)
            self._enter(c, c.chain.code(to), rec.id, msg, out_off, out_size)
        else:
            rec.push(1)
        return DelegateCall(to)

    def _precompile(self, rec: ActivationRecord, to: int, data: bytes, out_off: int, out_size: int) -> None:
        if to != IDENTITY_PRECOMPILE:
            raise Halt(HaltKind.INVALID, f"unsupported precompile 0x{to:x}")
        if out_size and data:
            rec.mwrite(out_off, data[:out_size])
        rec.push(1)

    def _suicide(self, c, rec, ins):
        beneficiary = rec.pop() & ADDRESS_MASK
        acct = c.chain.account(rec.id)
        if beneficiary != rec.id:
            c.chain.transfer(rec.id, beneficiary, acct.balance)
        acct.code = None
        acct.storage.clear()
        self._finish(c, b"", HaltKind.SUICIDE)
        return Suicide(beneficiary)

    # -- drivers ------------------------------------------------------------

    def run_transaction(
        self,
        s: ChainState,
        m: Message,
        block: Optional[BlockContext] = None,
    ) -> Tuple[ChainState, Trace, HaltKind]:
        if not s.is_contract(m.recipient):
            raise NotAContract(m.recipient)
        post = fork(s)
        if block is not None:
            post.block = block
        trace = Trace(m.recipient)
        if post.balance(m.sender) < m.value:
            logger.debug("sender cannot cover message value %d", m.value)
            trace.halts.append(HaltKind.INVALID)
            return self._rolled_back(s, block), trace, HaltKind.INVALID
        post.transfer(m.sender, m.recipient, m.value)
        root = ActivationRecord(self.program(post.code(m.recipient)), m.recipient, 0, [], bytearray(), m)
        c = Configuration([root], post, m.sender)

        view: Optional[ContractView] = None
        steps = 0
        try:
            while not c.done:
                if steps >= self.step_limit:
                    raise Halt(HaltKind.STEP_LIMIT, f"{self.step_limit} steps")
                steps += 1
                on_subject = c.top.id == m.recipient
                if on_subject and view is None:
                    view = ContractView.of(post.account(m.recipient))
                _, label = self.step(c)
                if on_subject:
                    trace.append(view, label)
                if not on_subject or not isinstance(label, (SLoad, type(INTERNAL))):
                    view = None
        except Halt as halt:
            logger.debug("transaction halted: %s", halt)
            trace.halts.append(halt.kind)
            return self._rolled_back(s, block), trace, halt.kind
        trace.halts.append(c.halt)
        return post, trace, c.halt

    @staticmethod
    def _rolled_back(s: ChainState, block: Optional[BlockContext]) -> ChainState:
        pre = fork(s)
        if block is not None:
            pre.block = block
        return pre

    def run_sequence(
        self,
        s: ChainState,
        msgs: Sequence[Message],
        blocks: Optional[Sequence[Optional[BlockContext]]] = None,
        block_interval_s: int = DEFAULT_BLOCK_INTERVAL_S,
    ) -> Tuple[ChainState, Trace]:
        """
        Apply msgs one per block, threading state. `blocks` may pin the block
        of each message; pinned blocks that would not strictly advance are
        replaced by the next regular block.
        """
        subjects = {m.recipient for m in msgs}
        if len(subjects) > 1:
            raise ValueError("all messages of a sequence must target the same contract")
        state = s
        trace = Trace(msgs[0].recipient if msgs else 0)
        for i, m in enumerate(msgs):
            prev = state.block
            block = blocks[i] if blocks and i < len(blocks) else None
            if block is None or block.number <= prev.number or block.timestamp <= prev.timestamp:
                block = prev.advance(1, block_interval_s)
            state, tx_trace, _ = self.run_transaction(state, m, block)
            trace.extend(tx_trace)
        return state, trace


_DISPATCH = {
    "STOP": Interpreter._stop,
    "POP": Interpreter._pop_op,
    "ADDRESS": Interpreter._env,
    "ORIGIN": Interpreter._env,
    "CALLER": Interpreter._env,
    "CALLVALUE": Interpreter._env,
    "CALLDATASIZE": Interpreter._env,
    "CODESIZE": Interpreter._env,
    "COINBASE": Interpreter._env,
    "TIMESTAMP": Interpreter._env,
    "NUMBER": Interpreter._env,
    "PC": Interpreter._env,
    "GAS": Interpreter._env,
    "BALANCE": Interpreter._balance,
    "EXTCODESIZE": Interpreter._extcodesize,
    "BLOCKHASH": Interpreter._blockhash,
    "CALLDATALOAD": Interpreter._calldataload,
    "CALLDATACOPY": Interpreter._calldatacopy,
    "MLOAD": Interpreter._mload,
    "MSTORE": Interpreter._mstore,
    "MSTORE8": Interpreter._mstore8,
    "SHA3": Interpreter._sha3,
    "SLOAD": Interpreter._sload,
    "SSTORE": Interpreter._sstore,
    "JUMP": Interpreter._jump,
    "JUMPI": Interpreter._jumpi,
    "JUMPDEST": Interpreter._jumpdest,
    "RETURN": Interpreter._return,
    "REVERT": Interpreter._revert,
    "INVALID": Interpreter._invalid,
    "CALL": Interpreter._call,
    "CALLCODE": Interpreter._callcode,
    "DELEGATECALL": Interpreter._delegatecall,
    "SUICIDE": Interpreter._suicide,
}
Interpreter._handlers = _DISPATCH


def initial_configuration(s: ChainState, m: Message) -> Configuration:
    """Configuration of a fresh transaction, without applying the value transfer."""
    if not s.is_contract(m.recipient):
        raise NotAContract(m.recipient)
    root = ActivationRecord(decode(s.code(m.recipient)), m.recipient, 0, [], bytearray(), m)
    return Configuration([root], s, m.sender)


def step(c: Configuration) -> Tuple[Configuration, Label]:
    return Interpreter().step(c)


def run_transaction(s: ChainState, m: Message, step_limit: int = DEFAULT_STEP_LIMIT) -> Tuple[ChainState, Trace, HaltKind]:
    return Interpreter(step_limit).run_transaction(s, m)


def run_sequence(
    s: ChainState,
    msgs: Sequence[Message],
    blocks: Optional[Sequence[Optional[BlockContext]]] = None,
    step_limit: int = DEFAULT_STEP_LIMIT,
    block_interval_s: int = DEFAULT_BLOCK_INTERVAL_S,
) -> Tuple[ChainState, Trace]:
    return Interpreter(step_limit).run_sequence(s, msgs, blocks, block_interval_s)
