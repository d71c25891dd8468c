"""
Opcode table and support matrix.

Each entry records the byte, the number of stack items consumed and
produced, the immediate width and whether the interpreters implement it.
Bytes missing from the table decode as invalid instructions.
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, Optional


@dataclass(frozen=True)
class OpcodeSpec:
    byte: int
    mnemonic: str
    pops: int
    pushes: int
    immediate_size: int = 0
    implemented: bool = True

    @property
    def is_push(self) -> bool:
        return self.immediate_size > 0


# mnemonic -> [byte, pops, pushes]
_BASE_OPCODES = {
    "STOP": [0x00, 0, 0],
    "ADD": [0x01, 2, 1],
    "MUL": [0x02, 2, 1],
    "SUB": [0x03, 2, 1],
    "DIV": [0x04, 2, 1],
    "SDIV": [0x05, 2, 1],
    "MOD": [0x06, 2, 1],
    "SMOD": [0x07, 2, 1],
    "ADDMOD": [0x08, 3, 1],
    "MULMOD": [0x09, 3, 1],
    "EXP": [0x0A, 2, 1],
    "SIGNEXTEND": [0x0B, 2, 1],
    "LT": [0x10, 2, 1],
    "GT": [0x11, 2, 1],
    "SLT": [0x12, 2, 1],
    "SGT": [0x13, 2, 1],
    "EQ": [0x14, 2, 1],
    "ISZERO": [0x15, 1, 1],
    "AND": [0x16, 2, 1],
    "OR": [0x17, 2, 1],
    "XOR": [0x18, 2, 1],
    "NOT": [0x19, 1, 1],
    "BYTE": [0x1A, 2, 1],
    "SHL": [0x1B, 2, 1],
    "SHR": [0x1C, 2, 1],
    "SAR": [0x1D, 2, 1],
    "SHA3": [0x20, 2, 1],
    "ADDRESS": [0x30, 0, 1],
    "BALANCE": [0x31, 1, 1],
    "ORIGIN": [0x32, 0, 1],
    "CALLER": [0x33, 0, 1],
    "CALLVALUE": [0x34, 0, 1],
    "CALLDATALOAD": [0x35, 1, 1],
    "CALLDATASIZE": [0x36, 0, 1],
    "CALLDATACOPY": [0x37, 3, 0],
    "CODESIZE": [0x38, 0, 1],
    "CODECOPY": [0x39, 3, 0],
    "GASPRICE": [0x3A, 0, 1],
    "EXTCODESIZE": [0x3B, 1, 1],
    "EXTCODECOPY": [0x3C, 4, 0],
    "RETURNDATASIZE": [0x3D, 0, 1],
    "RETURNDATACOPY": [0x3E, 3, 0],
    "EXTCODEHASH": [0x3F, 1, 1],
    "BLOCKHASH": [0x40, 1, 1],
    "COINBASE": [0x41, 0, 1],
    "TIMESTAMP": [0x42, 0, 1],
    "NUMBER": [0x43, 0, 1],
    "DIFFICULTY": [0x44, 0, 1],
    "GASLIMIT": [0x45, 0, 1],
    "POP": [0x50, 1, 0],
    "MLOAD": [0x51, 1, 1],
    "MSTORE": [0x52, 2, 0],
    "MSTORE8": [0x53, 2, 0],
    "SLOAD": [0x54, 1, 1],
    "SSTORE": [0x55, 2, 0],
    "JUMP": [0x56, 1, 0],
    "JUMPI": [0x57, 2, 0],
    "PC": [0x58, 0, 1],
    "MSIZE": [0x59, 0, 1],
    "GAS": [0x5A, 0, 1],
    "JUMPDEST": [0x5B, 0, 0],
    "LOG0": [0xA0, 2, 0],
    "LOG1": [0xA1, 3, 0],
    "LOG2": [0xA2, 4, 0],
    "LOG3": [0xA3, 5, 0],
    "LOG4": [0xA4, 6, 0],
    "CREATE": [0xF0, 3, 1],
    "CALL": [0xF1, 7, 1],
    "CALLCODE": [0xF2, 7, 1],
    "RETURN": [0xF3, 2, 0],
    "DELEGATECALL": [0xF4, 6, 1],
    "CREATE2": [0xF5, 4, 1],
    "STATICCALL": [0xFA, 6, 1],
    "REVERT": [0xFD, 2, 0],
    "INVALID": [0xFE, 0, 0],
    "SUICIDE": [0xFF, 1, 0],
}

# Decodable but never executed: paths reaching them are pruned (symbolic)
# or halt exceptionally (concrete).
UNIMPLEMENTED: FrozenSet[str] = frozenset({
    "CREATE",
    "CREATE2",
    "EXTCODECOPY",
    "EXTCODEHASH",
    "RETURNDATASIZE",
    "RETURNDATACOPY",
    "STATICCALL",
    "CODECOPY",
    "GASPRICE",
    "DIFFICULTY",
    "GASLIMIT",
    "MSIZE",
})

RELEASE_OPCODES: FrozenSet[str] = frozenset({"CALL", "CALLCODE", "DELEGATECALL", "SUICIDE"})

TERMINATING_OPCODES: FrozenSet[str] = frozenset({"STOP", "RETURN", "REVERT", "INVALID", "SUICIDE"})


def _build_table() -> Dict[int, OpcodeSpec]:
    table: Dict[int, OpcodeSpec] = {}
    for mnemonic, (byte, pops, pushes) in _BASE_OPCODES.items():
        table[byte] = OpcodeSpec(byte, mnemonic, pops, pushes, 0, mnemonic not in UNIMPLEMENTED)
    for n in range(1, 33):
        table[0x5F + n] = OpcodeSpec(0x5F + n, f"PUSH{n}", 0, 1, n)
    for n in range(1, 17):
        table[0x7F + n] = OpcodeSpec(0x7F + n, f"DUP{n}", n, n + 1)
        table[0x8F + n] = OpcodeSpec(0x8F + n, f"SWAP{n}", n + 1, n + 1)
    return table


OPCODES: Dict[int, OpcodeSpec] = _build_table()
BY_MNEMONIC: Dict[str, OpcodeSpec] = {spec.mnemonic: spec for spec in OPCODES.values()}
BY_MNEMONIC["SELFDESTRUCT"] = BY_MNEMONIC["SUICIDE"]
BY_MNEMONIC["KECCAK256"] = BY_MNEMONIC["SHA3"]


def lookup(byte: int) -> Optional[OpcodeSpec]:
    return OPCODES.get(byte)


def by_mnemonic(mnemonic: str) -> Optional[OpcodeSpec]:
    return BY_MNEMONIC.get(mnemonic.upper())


def support_matrix() -> Dict[str, bool]:
    """Mnemonic -> implemented, for every known opcode, in byte order."""
    return {OPCODES[b].mnemonic: OPCODES[b].implemented for b in sorted(OPCODES)}
