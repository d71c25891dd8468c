"""
256-bit word arithmetic with EVM semantics.

Every function takes and returns unsigned Python ints in [0, 2**256). The
concrete interpreter calls these directly and the symbolic layer uses the
same table for constant folding, so both sides agree bit for bit.
"""

from typing import Callable, Dict

WORD_BITS = 256
WORD_BYTES = 32
UINT256_MASK = (1 << WORD_BITS) - 1
UINT256_CEIL = 1 << WORD_BITS
SIGN_BIT = 1 << (WORD_BITS - 1)
ADDRESS_MASK = (1 << 160) - 1


def to_signed(x: int) -> int:
    return x - UINT256_CEIL if x & SIGN_BIT else x


def to_unsigned(x: int) -> int:
    return x & UINT256_MASK


def add(a: int, b: int) -> int:
    return (a + b) & UINT256_MASK


def sub(a: int, b: int) -> int:
    return (a - b) & UINT256_MASK


def mul(a: int, b: int) -> int:
    return (a * b) & UINT256_MASK


def div(a: int, b: int) -> int:
    return 0 if b == 0 else a // b


def sdiv(a: int, b: int) -> int:
    if b == 0:
        return 0
    sa, sb = to_signed(a), to_signed(b)
    sign = -1 if (sa < 0) != (sb < 0) else 1
    return to_unsigned(sign * (abs(sa) // abs(sb)))


def mod(a: int, b: int) -> int:
    return 0 if b == 0 else a % b


def smod(a: int, b: int) -> int:
    if b == 0:
        return 0
    sa, sb = to_signed(a), to_signed(b)
    sign = -1 if sa < 0 else 1
    return to_unsigned(sign * (abs(sa) % abs(sb)))


def addmod(a: int, b: int, n: int) -> int:
    return 0 if n == 0 else (a + b) % n


def mulmod(a: int, b: int, n: int) -> int:
    return 0 if n == 0 else (a * b) % n


def exp(base: int, exponent: int) -> int:
    return pow(base, exponent, UINT256_CEIL)


def signextend(b: int, x: int) -> int:
    if b >= 31:
        return x
    bits = 8 * (b + 1)
    sign = 1 << (bits - 1)
    low = x & ((1 << bits) - 1)
    if low & sign:
        return (low | (UINT256_MASK ^ ((1 << bits) - 1))) & UINT256_MASK
    return low


def lt(a: int, b: int) -> int:
    return 1 if a < b else 0


def gt(a: int, b: int) -> int:
    return 1 if a > b else 0


def slt(a: int, b: int) -> int:
    return 1 if to_signed(a) < to_signed(b) else 0


def sgt(a: int, b: int) -> int:
    return 1 if to_signed(a) > to_signed(b) else 0


def eq(a: int, b: int) -> int:
    return 1 if a == b else 0


def iszero(a: int) -> int:
    return 1 if a == 0 else 0


def and_(a: int, b: int) -> int:
    return a & b


def or_(a: int, b: int) -> int:
    return a | b


def xor(a: int, b: int) -> int:
    return a ^ b


def not_(a: int) -> int:
    return UINT256_MASK ^ a


def byte(i: int, x: int) -> int:
    if i >= WORD_BYTES:
        return 0
    return (x >> (8 * (WORD_BYTES - 1 - i))) & 0xFF


def shl(shift: int, value: int) -> int:
    if shift >= WORD_BITS:
        return 0
    return (value << shift) & UINT256_MASK


def shr(shift: int, value: int) -> int:
    if shift >= WORD_BITS:
        return 0
    return value >> shift


def sar(shift: int, value: int) -> int:
    signed = to_signed(value)
    if shift >= WORD_BITS:
        return UINT256_MASK if signed < 0 else 0
    return to_unsigned(signed >> shift)


# Operand order follows the EVM stack: the first argument is the top of stack.
UNARY_OPS: Dict[str, Callable[[int], int]] = {
    "not": not_,
    "iszero": iszero,
}

BINARY_OPS: Dict[str, Callable[[int, int], int]] = {
    "add": add,
    "sub": sub,
    "mul": mul,
    "div": div,
    "sdiv": sdiv,
    "mod": mod,
    "smod": smod,
    "exp": exp,
    "signextend": signextend,
    "lt": lt,
    "gt": gt,
    "slt": slt,
    "sgt": sgt,
    "eq": eq,
    "and": and_,
    "or": or_,
    "xor": xor,
    "byte": byte,
    "shl": shl,
    "shr": shr,
    "sar": sar,
}

TERNARY_OPS: Dict[str, Callable[[int, int, int], int]] = {
    "addmod": addmod,
    "mulmod": mulmod,
}

COMPARISON_OPS = frozenset({"lt", "gt", "slt", "sgt", "eq", "iszero"})


def word_to_bytes(x: int) -> bytes:
    return (x & UINT256_MASK).to_bytes(WORD_BYTES, "big")


def bytes_to_word(data: bytes) -> int:
    """Big-endian read, zero-padded on the right up to 32 bytes."""
    if len(data) < WORD_BYTES:
        data = data + b"\x00" * (WORD_BYTES - len(data))
    return int.from_bytes(data[:WORD_BYTES], "big")
