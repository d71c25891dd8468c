"""
A small line-oriented EVM assembler used to build the fixture corpus.

Syntax, one item per line (several items may share a line):

    ; comment
    name:              label, emits JUMPDEST
    PUSH1 0x60         explicit width
    PUSH 1000          minimal width (PUSH1 for zero)
    PUSH @name         label reference, always PUSH2
    ADD                any mnemonic from the opcode table
"""

from typing import Dict, List, Tuple, Union

from tracehound.bytecode.opcodes import BY_MNEMONIC
from tracehound.errors import AssemblyError

_Item = Tuple[str, Union[int, str, None], int]


def _parse_int(token: str) -> int:
    try:
        return int(token, 0)
    except ValueError:
        raise AssemblyError(f"bad immediate {token!r}") from None


def _tokenize(source: str) -> List[str]:
    tokens: List[str] = []
    for line in source.splitlines():
        line = line.split(";", 1)[0]
        tokens.extend(line.split())
    return tokens


def _parse(source: str) -> List[_Item]:
    """Returns (kind, payload, width) items; kind is 'label', 'op' or 'push'."""
    tokens = _tokenize(source)
    items: List[_Item] = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok.endswith(":"):
            items.append(("label", tok[:-1], 1))
            i += 1
            continue
        upper = tok.upper()
        if upper == "PUSH" or (upper.startswith("PUSH") and upper[4:].isdigit()):
            if i + 1 >= len(tokens):
                raise AssemblyError(f"{tok} without an operand")
            operand = tokens[i + 1]
            width = int(upper[4:]) if upper != "PUSH" else 0
            if operand.startswith("@"):
                if width not in (0, 2):
                    raise AssemblyError(f"label reference {operand} needs PUSH2")
                items.append(("push", operand[1:], 2))
            else:
                value = _parse_int(operand)
                if value < 0:
                    raise AssemblyError(f"negative immediate {operand}")
                needed = max(1, (value.bit_length() + 7) // 8)
                if width == 0:
                    width = needed
                if width > 32 or needed > width:
                    raise AssemblyError(f"{operand} does not fit in PUSH{width}")
                items.append(("push", value, width))
            i += 2
            continue
        if upper not in BY_MNEMONIC:
            raise AssemblyError(f"unknown mnemonic {tok!r}")
        items.append(("op", upper, 1))
        i += 1
    return items


def assemble(source: str) -> bytes:
    items = _parse(source)
    labels: Dict[str, int] = {}
    offset = 0
    for kind, payload, width in items:
        if kind == "label":
            if payload in labels:
                raise AssemblyError(f"label {payload!r} defined twice")
            labels[payload] = offset
            offset += 1
        elif kind == "push":
            offset += 1 + width
        else:
            offset += 1

    out = bytearray()
    for kind, payload, width in items:
        if kind == "label":
            out.append(BY_MNEMONIC["JUMPDEST"].byte)
        elif kind == "push":
            if isinstance(payload, str):
                if payload not in labels:
                    raise AssemblyError(f"undefined label {payload!r}")
                value = labels[payload]
            else:
                value = payload
            out.append(0x5F + width)
            out.extend(value.to_bytes(width, "big"))
        else:
            out.append(BY_MNEMONIC[payload].byte)
    return bytes(out)
