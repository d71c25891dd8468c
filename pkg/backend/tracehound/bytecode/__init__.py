"""Bytecode decoding, opcode support matrix and the fixture assembler."""

from tracehound.bytecode.opcodes import (
    OPCODES,
    RELEASE_OPCODES,
    UNIMPLEMENTED,
    OpcodeSpec,
    by_mnemonic,
    lookup,
    support_matrix,
)
from tracehound.bytecode.program import (
    BYTECODE_FORMATS,
    Instruction,
    Program,
    contains_opcode,
    contains_release_opcode,
    decode,
    decode_hex,
    disassemble,
    encode,
    load_bytecode,
    parse_hex,
)
from tracehound.bytecode.assembler import assemble

__all__ = [
    "OPCODES",
    "RELEASE_OPCODES",
    "UNIMPLEMENTED",
    "OpcodeSpec",
    "by_mnemonic",
    "lookup",
    "support_matrix",
    "BYTECODE_FORMATS",
    "Instruction",
    "Program",
    "contains_opcode",
    "contains_release_opcode",
    "decode",
    "decode_hex",
    "disassemble",
    "encode",
    "load_bytecode",
    "parse_hex",
    "assemble",
]
