"""
Symbolic 256-bit expressions.

Nodes are immutable and hash-consed by a structural fingerprint, so equal
trees compare equal in O(1) and fingerprints double as stable digests.
Every constructor folds constants eagerly: a tree without variables is
always a single `Const`.
"""

import hashlib
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple

from eth_utils import keccak

from tracehound.errors import UnsupportedExpression
from tracehound.words import (
    BINARY_OPS,
    COMPARISON_OPS,
    TERNARY_OPS,
    UINT256_MASK,
    UNARY_OPS,
    word_to_bytes,
)


class VarOrigin(str, Enum):
    CALLVALUE = "callvalue"
    CALLER = "caller"
    ORIGIN = "origin"
    CALLDATA = "calldata"
    CALLDATASIZE = "calldatasize"
    NUMBER = "number"
    TIMESTAMP = "timestamp"
    BLOCKHASH = "blockhash"
    BALANCE = "balance"
    ADDRESS = "address"
    EXTERNAL_CALL_RETURN = "external_call_return"
    EXTERNAL_STATE = "external_state"


def _digest(*parts: bytes) -> bytes:
    h = hashlib.blake2b(digest_size=16)
    for p in parts:
        h.update(len(p).to_bytes(4, "big"))
        h.update(p)
    return h.digest()


class SymValue:
    """Base class; `fp` is the structural fingerprint."""

    __slots__ = ()
    fp: bytes

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SymValue) and self.fp == other.fp

    def __hash__(self) -> int:
        return hash(self.fp)

    @property
    def is_concrete(self) -> bool:
        return False


@dataclass(frozen=True, eq=False)
class Const(SymValue):
    value: int
    fp: bytes = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "fp", _digest(b"c", word_to_bytes(self.value)))

    @property
    def is_concrete(self) -> bool:
        return True

    def __repr__(self) -> str:
        return f"Const(0x{self.value:x})"


@dataclass(frozen=True, eq=False)
class Var(SymValue):
    name: str
    origin: VarOrigin
    fp: bytes = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "fp", _digest(b"v", self.name.encode()))

    def __repr__(self) -> str:
        return f"Var({self.name})"


@dataclass(frozen=True, eq=False)
class Op(SymValue):
    name: str
    args: Tuple[SymValue, ...]
    fp: bytes = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "fp", _digest(b"o", self.name.encode(), *(a.fp for a in self.args)))

    def __repr__(self) -> str:
        return f"{self.name}({', '.join(map(repr, self.args))})"


@dataclass(frozen=True, eq=False)
class Hash(SymValue):
    """Keccak-256 of `length` bytes laid out as consecutive big-endian words."""

    args: Tuple[SymValue, ...]
    length: int
    fp: bytes = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(
            self, "fp", _digest(b"h", self.length.to_bytes(8, "big"), *(a.fp for a in self.args))
        )

    @property
    def name(self) -> str:
        return "h_" + self.fp.hex()

    def __repr__(self) -> str:
        return f"keccak{self.length}({', '.join(map(repr, self.args))})"


_SMALL = [Const(i) for i in range(257)]
ZERO = _SMALL[0]
ONE = _SMALL[1]
MAX_WORD = Const(UINT256_MASK)


def const(value: int) -> Const:
    value &= UINT256_MASK
    return _SMALL[value] if value <= 256 else Const(value)


def var(name: str, origin: VarOrigin) -> Var:
    return Var(name, origin)


def is_concrete(v: SymValue) -> bool:
    return isinstance(v, Const)


def _is_const(v: SymValue, value: int) -> bool:
    return isinstance(v, Const) and v.value == value


def is_boolean(v: SymValue) -> bool:
    """True when v can only be 0 or 1."""
    if isinstance(v, Const):
        return v.value in (0, 1)
    if isinstance(v, Op):
        if v.name in COMPARISON_OPS:
            return True
        if v.name in ("and", "or"):
            return all(is_boolean(a) for a in v.args)
    return False


def _simplify(name: str, args: Tuple[SymValue, ...]) -> Optional[SymValue]:
    """Algebraic identities that keep trees small; None when nothing applies."""
    if len(args) == 2:
        a, b = args
        if name == "add":
            if _is_const(a, 0):
                return b
            if _is_const(b, 0):
                return a
            # c1 + (x + c2) -> x + (c1 + c2)
            if isinstance(a, Const) and isinstance(b, Op) and b.name == "add" and isinstance(b.args[0], Const):
                return mk("add", const(a.value + b.args[0].value), b.args[1])
            if isinstance(b, Const) and not isinstance(a, Const):
                return mk("add", b, a)
        elif name == "sub":
            if _is_const(b, 0):
                return a
            if a == b:
                return ZERO
            if isinstance(b, Const):
                return mk("add", const(-b.value), a)
        elif name == "mul":
            if _is_const(a, 0) or _is_const(b, 0):
                return ZERO
            if _is_const(a, 1):
                return b
            if _is_const(b, 1):
                return a
        elif name in ("div", "sdiv"):
            if _is_const(b, 1):
                return a
            if _is_const(b, 0) or _is_const(a, 0):
                return ZERO
        elif name in ("mod", "smod"):
            if _is_const(b, 0) or _is_const(b, 1):
                return ZERO
        elif name == "and":
            if _is_const(a, 0) or _is_const(b, 0):
                return ZERO
            if _is_const(a, UINT256_MASK):
                return b
            if _is_const(b, UINT256_MASK):
                return a
            if a == b:
                return a
            if _is_const(a, 1) and is_boolean(b):
                return b
            if _is_const(b, 1) and is_boolean(a):
                return a
        elif name in ("or", "xor"):
            if _is_const(a, 0):
                return b
            if _is_const(b, 0):
                return a
            if a == b:
                return a if name == "or" else ZERO
        elif name == "eq":
            if a == b:
                return ONE
        elif name in ("shl", "shr", "sar"):
            if _is_const(a, 0):
                return b
            if name != "sar" and _is_const(b, 0):
                return ZERO
        elif name == "exp":
            base, exponent = a, b
            if _is_const(exponent, 0):
                return ONE
            if _is_const(exponent, 1):
                return base
            if isinstance(base, Const):
                if base.value == 0:
                    return mk("iszero", exponent)
                if base.value == 1:
                    return ONE
                if base.value == 2:
                    return mk("shl", exponent, ONE)
                j = base.value.bit_length() - 1
                if base.value == 1 << j:
                    # (2^j)^e is zero once e >= 256; the guard keeps j*e from wrapping
                    in_range = mk("lt", exponent, const(256))
                    return mk("mul", in_range, mk("shl", mk("mul", const(j), exponent), ONE))
                raise UnsupportedExpression(f"symbolic exponent with base 0x{base.value:x}")
            if isinstance(exponent, Const) and exponent.value <= 8:
                out: SymValue = base
                for _ in range(exponent.value - 1):
                    out = mk("mul", out, base)
                return out
            raise UnsupportedExpression("exponentiation of a symbolic base")
        elif name == "signextend":
            if isinstance(a, Const):
                if a.value >= 31:
                    return b
                return None
            raise UnsupportedExpression("symbolic SIGNEXTEND width")
        elif name in ("lt", "gt", "slt", "sgt"):
            if a == b:
                return ZERO
    elif len(args) == 1 and name == "iszero":
        (a,) = args
        # iszero(iszero(cmp)) -> cmp for 0/1-valued cmp
        if isinstance(a, Op) and a.name == "iszero":
            inner = a.args[0]
            if isinstance(inner, Op) and inner.name in COMPARISON_OPS:
                return inner
    elif len(args) == 1 and name == "not":
        (a,) = args
        if isinstance(a, Op) and a.name == "not":
            return a.args[0]
    return None


def mk(name: str, *args: SymValue) -> SymValue:
    """Build an operation node with EVM operand order (first arg = top of stack)."""
    if all(isinstance(a, Const) for a in args):
        values = [a.value for a in args]
        if name in UNARY_OPS:
            return const(UNARY_OPS[name](*values))
        if name in BINARY_OPS:
            return const(BINARY_OPS[name](*values))
        if name in TERNARY_OPS:
            return const(TERNARY_OPS[name](*values))
        raise ValueError(f"unknown operation {name}")
    simplified = _simplify(name, args)
    if simplified is not None:
        return simplified
    return Op(name, tuple(args))


def mk_hash(words: List[SymValue], length: int) -> SymValue:
    """Keccak-256 over `length` bytes made of `words`; folds when all are concrete."""
    if all(isinstance(w, Const) for w in words):
        data = b"".join(word_to_bytes(w.value) for w in words)[:length]
        return const(int.from_bytes(keccak(data), "big"))
    return Hash(tuple(words), length)


def truthy(v: SymValue) -> SymValue:
    """0/1 word that is 1 iff v is nonzero."""
    return mk("iszero", mk("iszero", v))


def negate(cond: SymValue) -> SymValue:
    return mk("iszero", cond)


def conj(*conds: SymValue) -> SymValue:
    """0/1 conjunction of truth-valued words."""
    out: SymValue = ONE
    for c in conds:
        out = mk("and", out, truthy(c))
    return out


def disj(*conds: SymValue) -> SymValue:
    out: SymValue = ZERO
    for c in conds:
        out = mk("or", out, truthy(c))
    return out


def walk(roots: Iterable[SymValue]) -> List[SymValue]:
    """Every distinct node reachable from roots, children before parents."""
    order: List[SymValue] = []
    seen: Set[bytes] = set()
    stack: List[Tuple[SymValue, bool]] = [(r, False) for r in roots]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if node.fp in seen:
            continue
        seen.add(node.fp)
        stack.append((node, True))
        if isinstance(node, (Op, Hash)):
            for child in reversed(node.args):
                if child.fp not in seen:
                    stack.append((child, False))
    return order


def free_vars(roots: Iterable[SymValue]) -> List[Var]:
    return [n for n in walk(roots) if isinstance(n, Var)]


def hashes(roots: Iterable[SymValue]) -> List[Hash]:
    return [n for n in walk(roots) if isinstance(n, Hash)]


def contains_hash(v: SymValue) -> bool:
    return any(isinstance(n, Hash) for n in walk([v]))


def evaluate(v: SymValue, model: Mapping[str, int], default: int = 0) -> int:
    """
    Bit-exact value of v under model. Hash nodes take the model's value for
    their application name when present (uninterpreted reading), else the
    real Keccak-256 of their evaluated arguments.
    """
    values: Dict[bytes, int] = {}
    for node in walk([v]):
        if isinstance(node, Const):
            values[node.fp] = node.value
        elif isinstance(node, Var):
            values[node.fp] = model.get(node.name, default) & UINT256_MASK
        elif isinstance(node, Hash):
            if node.name in model:
                values[node.fp] = model[node.name] & UINT256_MASK
            else:
                data = b"".join(word_to_bytes(values[a.fp]) for a in node.args)[: node.length]
                values[node.fp] = int.from_bytes(keccak(data), "big")
        else:
            operands = [values[a.fp] for a in node.args]
            if node.name in UNARY_OPS:
                values[node.fp] = UNARY_OPS[node.name](*operands)
            elif node.name in BINARY_OPS:
                values[node.fp] = BINARY_OPS[node.name](*operands)
            else:
                values[node.fp] = TERNARY_OPS[node.name](*operands)
    return values[v.fp]


def _rebuild(v: SymValue, leaf) -> SymValue:
    out: Dict[bytes, SymValue] = {}
    for node in walk([v]):
        replaced = leaf(node)
        if replaced is not None:
            out[node.fp] = replaced
        elif isinstance(node, (Const, Var)):
            out[node.fp] = node
        elif isinstance(node, Hash):
            out[node.fp] = mk_hash([out[a.fp] for a in node.args], node.length)
        else:
            out[node.fp] = mk(node.name, *(out[a.fp] for a in node.args))
    return out[v.fp]


def substitute(v: SymValue, mapping: Mapping[str, SymValue]) -> SymValue:
    """Replace variables by name and re-fold."""
    if not mapping:
        return v
    return _rebuild(v, lambda n: mapping.get(n.name) if isinstance(n, Var) else None)


def replace_nodes(v: SymValue, mapping: Mapping[bytes, SymValue]) -> SymValue:
    """Replace whole subterms by fingerprint and re-fold."""
    if not mapping or isinstance(v, Const):
        return v
    return _rebuild(v, lambda n: mapping.get(n.fp))


def split_offset(v: SymValue) -> Tuple[SymValue, int]:
    """(term, c) with v == c + term; c is 0 when v has no constant summand."""
    if isinstance(v, Op) and v.name == "add" and isinstance(v.args[0], Const):
        return v.args[1], v.args[0].value
    return v, 0
