"""
Where the engine's environment values come from.

`SymbolicInputs` hands out solver variables for everything an invocation
reads from its message and block. `ConcreteInputs` pins the same reads to
recorded messages and blocks, which turns the engine into a tracer that
must agree with the concrete interpreter.
"""

from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from tracehound.chainstate.state import BlockContext, ChainState, Message, blockhash
from tracehound.symbolic.expr import (
    MAX_WORD,
    ZERO,
    Const,
    SymValue,
    VarOrigin,
    const,
    evaluate,
    mk,
    negate,
    var,
)
from tracehound.symbolic.memory import Cell
from tracehound.words import ADDRESS_MASK, WORD_BYTES, bytes_to_word, word_to_bytes

U64 = 1 << 64


class SymbolicInputs:
    """One shared CALLER; fresh value, calldata and block variables per invocation."""

    concrete = False

    def __init__(self, start: ChainState, calldata_cap: int):
        self.start = start
        self.cap = calldata_cap
        self._caller = var("caller", VarOrigin.CALLER)
        self._words: Dict[Tuple[int, int], SymValue] = {}

    def caller(self, i: int) -> SymValue:
        return self._caller

    def callvalue(self, i: int) -> SymValue:
        return var(f"cv_{i}", VarOrigin.CALLVALUE)

    def calldatasize(self, i: int) -> SymValue:
        return var(f"cds_{i}", VarOrigin.CALLDATASIZE)

    def number(self, i: int) -> SymValue:
        return var(f"number_{i}", VarOrigin.NUMBER)

    def timestamp(self, i: int) -> SymValue:
        return var(f"timestamp_{i}", VarOrigin.TIMESTAMP)

    def blockhash(self, i: int, n: SymValue) -> SymValue:
        return var("bh_" + n.fp.hex()[:16], VarOrigin.BLOCKHASH)

    def invocation_constraints(self, i: int) -> List[SymValue]:
        """Blocks strictly advance from the snapshot; calldata stays under the cap."""
        if i == 0:
            prev_number: SymValue = const(self.start.block.number)
            prev_time: SymValue = const(self.start.block.timestamp)
        else:
            prev_number, prev_time = self.number(i - 1), self.timestamp(i - 1)
        return [
            mk("gt", self.number(i), prev_number),
            mk("lt", self.number(i), const(U64)),
            mk("gt", self.timestamp(i), prev_time),
            mk("lt", self.timestamp(i), const(U64)),
            negate(mk("gt", self.calldatasize(i), const(self.cap))),
        ]

    def _word(self, i: int, w: int) -> Tuple[SymValue, List[SymValue]]:
        if w * WORD_BYTES >= self.cap:
            return ZERO, []
        word = var(f"cd_{i}_{w}", VarOrigin.CALLDATA)
        # bytes at or past CALLDATASIZE read as zero
        size = self.calldatasize(i)
        start = const(w * WORD_BYTES)
        present = mk("mul", mk("gt", size, start), mk("sub", size, start))
        keep = mk("shr", mk("mul", const(8), present), MAX_WORD)
        return word, [negate(mk("and", word, keep))]

    def calldataload(self, i: int, offset: int) -> Tuple[SymValue, List[SymValue]]:
        if offset >= self.cap:
            return ZERO, []
        w, r = divmod(offset, WORD_BYTES)
        hi, axioms = self._word(i, w)
        if r == 0:
            return hi, axioms
        lo, more = self._word(i, w + 1)
        value = mk("or", mk("shl", const(8 * r), hi), mk("shr", const(8 * (WORD_BYTES - r)), lo))
        return value, axioms + more

    def calldata_cells(self, i: int, offset: int, size: int) -> Tuple[List[Cell], List[SymValue]]:
        cells: List[Cell] = []
        axioms: List[SymValue] = []
        seen = set()
        for p in range(offset, offset + size):
            if p >= self.cap:
                cells.append(0)
                continue
            w, r = divmod(p, WORD_BYTES)
            word, ax = self._word(i, w)
            if w not in seen:
                seen.add(w)
                axioms.extend(ax)
            cells.append((word, r))
        return cells, axioms

    def message(self, i: int, model: Mapping[str, int], subject: int) -> Message:
        size = min(model.get(f"cds_{i}", 0), self.cap)
        words = (size + WORD_BYTES - 1) // WORD_BYTES
        data = b"".join(word_to_bytes(model.get(f"cd_{i}_{w}", 0)) for w in range(words))[:size]
        sender = evaluate(self._caller, model) & ADDRESS_MASK
        return Message(sender, model.get(f"cv_{i}", 0), data, subject)

    def block_at(self, i: int, model: Mapping[str, int]) -> Tuple[int, int]:
        return model.get(f"number_{i}", 0), model.get(f"timestamp_{i}", 0)


class ConcreteInputs:
    """Inputs pinned to recorded messages and the blocks they ran in."""

    concrete = True

    def __init__(self, msgs: Sequence[Message], blocks: Sequence[BlockContext]):
        if len(blocks) < len(msgs):
            raise ValueError("every message needs a block")
        self.msgs = list(msgs)
        self.blocks = list(blocks)

    def caller(self, i: int) -> SymValue:
        return const(self.msgs[i].sender)

    def callvalue(self, i: int) -> SymValue:
        return const(self.msgs[i].value)

    def calldatasize(self, i: int) -> SymValue:
        return const(len(self.msgs[i].data))

    def number(self, i: int) -> SymValue:
        return const(self.blocks[i].number)

    def timestamp(self, i: int) -> SymValue:
        return const(self.blocks[i].timestamp)

    def blockhash(self, i: int, n: SymValue) -> SymValue:
        if isinstance(n, Const):
            return const(blockhash(self.blocks[i], n.value))
        return var("bh_" + n.fp.hex()[:16], VarOrigin.BLOCKHASH)

    def invocation_constraints(self, i: int) -> List[SymValue]:
        return []

    def calldataload(self, i: int, offset: int) -> Tuple[SymValue, List[SymValue]]:
        data = self.msgs[i].data
        if offset >= len(data):
            return ZERO, []
        return const(bytes_to_word(data[offset: offset + WORD_BYTES])), []

    def calldata_cells(self, i: int, offset: int, size: int) -> Tuple[List[Cell], List[SymValue]]:
        data = self.msgs[i].data
        chunk = data[offset: offset + size] if offset < len(data) else b""
        return list(chunk) + [0] * (size - len(chunk)), []

    def message(self, i: int, model: Mapping[str, int], subject: int) -> Message:
        return self.msgs[i]

    def block_at(self, i: int, model: Mapping[str, int]) -> Tuple[int, int]:
        return self.blocks[i].number, self.blocks[i].timestamp


def schedule_blocks(
    start: BlockContext,
    count: int,
    pinned: Optional[Sequence[Optional[BlockContext]]] = None,
    interval_s: int = 15,
) -> List[BlockContext]:
    """The blocks `run_sequence` executes `count` messages in."""
    out: List[BlockContext] = []
    prev = start
    for i in range(count):
        block = pinned[i] if pinned and i < len(pinned) else None
        if block is None or block.number <= prev.number or block.timestamp <= prev.timestamp:
            block = prev.advance(1, interval_s)
        out.append(block)
        prev = block
    return out
