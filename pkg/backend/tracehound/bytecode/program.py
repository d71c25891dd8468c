"""Decoding raw bytecode into an instruction stream."""

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Union

from eth_utils import keccak

from tracehound.bytecode.opcodes import RELEASE_OPCODES, OpcodeSpec, lookup
from tracehound.errors import BytecodeFormatError

_HEX_RE = re.compile(r"^(0x)?[0-9a-fA-F]*$")


@dataclass(frozen=True)
class Instruction:
    offset: int
    byte: int
    spec: Optional[OpcodeSpec]
    immediate: bytes = b""
    truncated: bool = False

    @property
    def mnemonic(self) -> str:
        return self.spec.mnemonic if self.spec else f"INVALID(0x{self.byte:02x})"

    @property
    def is_valid(self) -> bool:
        return self.spec is not None

    @property
    def implemented(self) -> bool:
        return self.spec is not None and self.spec.implemented

    @property
    def size(self) -> int:
        return 1 + len(self.immediate)

    @property
    def push_value(self) -> int:
        """Immediate as a word; a truncated PUSH reads missing bytes as zero."""
        width = self.spec.immediate_size if self.spec else 0
        padded = self.immediate + b"\x00" * (width - len(self.immediate))
        return int.from_bytes(padded, "big") if padded else 0


@dataclass(frozen=True)
class Program:
    raw: bytes
    instrs: List[Instruction]
    jumpdests: FrozenSet[int]
    _index: Dict[int, int] = field(default_factory=dict, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.instrs)

    def at(self, offset: int) -> Optional[Instruction]:
        """Instruction starting at byte offset, or None when offset is mid-instruction or past the end."""
        i = self._index.get(offset)
        return None if i is None else self.instrs[i]

    def next_offset(self, instr: Instruction) -> int:
        return instr.offset + instr.size

    def mnemonics(self) -> FrozenSet[str]:
        return frozenset(ins.spec.mnemonic for ins in self.instrs if ins.spec)

    @property
    def digest(self) -> str:
        return "0x" + keccak(self.raw).hex()


def decode(raw: bytes) -> Program:
    raw = bytes(raw)
    instrs: List[Instruction] = []
    index: Dict[int, int] = {}
    jumpdests = set()
    pc = 0
    n = len(raw)
    while pc < n:
        byte = raw[pc]
        spec = lookup(byte)
        imm = b""
        truncated = False
        if spec is not None and spec.is_push:
            imm = raw[pc + 1: pc + 1 + spec.immediate_size]
            truncated = len(imm) < spec.immediate_size
        elif spec is not None and spec.mnemonic == "JUMPDEST":
            jumpdests.add(pc)
        index[pc] = len(instrs)
        instrs.append(Instruction(pc, byte, spec, imm, truncated))
        pc += 1 + len(imm)
    return Program(raw, instrs, frozenset(jumpdests), index)


def encode(program: Program) -> bytes:
    """Re-encode the instruction stream; reproduces the decoded bytes exactly."""
    return b"".join(bytes([ins.byte]) + ins.immediate for ins in program.instrs)


def parse_hex(text: str) -> bytes:
    cleaned = "".join(text.split())
    if not _HEX_RE.match(cleaned):
        raise BytecodeFormatError("bytecode is not a hex string")
    if cleaned[:2] in ("0x", "0X"):
        cleaned = cleaned[2:]
    if len(cleaned) % 2:
        raise BytecodeFormatError("hex bytecode has an odd number of digits")
    return bytes.fromhex(cleaned)


def decode_hex(text: str) -> Program:
    return decode(parse_hex(text))


BYTECODE_FORMATS = ("hex", "bin")


def load_bytecode(path: Union[str, Path], fmt: Optional[str] = None) -> bytes:
    """
    Read a bytecode file.

    `fmt` is "hex" (text, 0x optional, whitespace ignored) or "bin" (raw
    bytes). Without it a `.bin` suffix means binary and anything else hex.
    """
    p = Path(path)
    if fmt is None:
        fmt = "bin" if p.suffix.lower() == ".bin" else "hex"
    if fmt not in BYTECODE_FORMATS:
        raise ValueError(f"unknown bytecode format {fmt!r}")
    data = p.read_bytes()
    if fmt == "bin":
        return data
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError:
        raise BytecodeFormatError(f"{p.name} is not hex text; use a .bin file for raw bytecode")
    return parse_hex(text)


def contains_opcode(program: Program, mnemonics: Iterable[str]) -> bool:
    wanted = frozenset(m.upper() for m in mnemonics)
    return any(ins.spec is not None and ins.spec.mnemonic in wanted for ins in program.instrs)


def contains_release_opcode(program: Program) -> bool:
    return contains_opcode(program, RELEASE_OPCODES)


def disassemble(program: Program) -> List[str]:
    lines = []
    for ins in program.instrs:
        text = f"{ins.offset:05x}  {ins.mnemonic}"
        if ins.immediate or ins.truncated:
            text += f" 0x{ins.immediate.hex()}"
            if ins.truncated:
                text += "  ; truncated"
        lines.append(text)
    return lines
