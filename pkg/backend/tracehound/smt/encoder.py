"""
SMT-LIB2 text for path constraints.

Every word is a 256-bit bitvector. Shared subterms become `define-fun`
macros so the query grows with the DAG, not the tree. Keccak applications
are constants tied to one uninterpreted function per input length.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Set

from tracehound.symbolic.expr import Const, Hash, Op, SymValue, Var, is_boolean, walk
from tracehound.words import UINT256_MASK, WORD_BYTES

LOGIC = "QF_AUFBV"
BV256 = "(_ BitVec 256)"
ZERO_BV = "#x" + "0" * 64
ONE_BV = "#x" + "0" * 63 + "1"


def bv_literal(value: int, width: int = 256) -> str:
    return "#x" + format(value & ((1 << width) - 1), f"0{width // 4}x")


def node_name(node: SymValue) -> str:
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Hash):
        return node.name
    return "e_" + node.fp.hex()


def _ite(cond: str) -> str:
    return f"(ite {cond} {ONE_BV} {ZERO_BV})"


def _guarded(b: str, expr: str) -> str:
    return f"(ite (= {b} {ZERO_BV}) {ZERO_BV} {expr})"


def _widen(x: str) -> str:
    return f"((_ zero_extend 256) {x})"


def _op_term(op: Op, args: List[str]) -> str:
    n = op.name
    if n == "add":
        return f"(bvadd {args[0]} {args[1]})"
    if n == "sub":
        return f"(bvsub {args[0]} {args[1]})"
    if n == "mul":
        return f"(bvmul {args[0]} {args[1]})"
    if n == "div":
        return _guarded(args[1], f"(bvudiv {args[0]} {args[1]})")
    if n == "sdiv":
        return _guarded(args[1], f"(bvsdiv {args[0]} {args[1]})")
    if n == "mod":
        return _guarded(args[1], f"(bvurem {args[0]} {args[1]})")
    if n == "smod":
        return _guarded(args[1], f"(bvsrem {args[0]} {args[1]})")
    if n in ("addmod", "mulmod"):
        a, b, m = args
        inner = "bvadd" if n == "addmod" else "bvmul"
        wide = f"(bvurem ({inner} {_widen(a)} {_widen(b)}) {_widen(m)})"
        return _guarded(m, f"((_ extract 255 0) {wide})")
    if n == "signextend":
        width = op.args[0]
        assert isinstance(width, Const) and width.value < 31
        bits = 8 * (width.value + 1)
        return f"((_ sign_extend {256 - bits}) ((_ extract {bits - 1} 0) {args[1]}))"
    if n == "lt":
        return _ite(f"(bvult {args[0]} {args[1]})")
    if n == "gt":
        return _ite(f"(bvugt {args[0]} {args[1]})")
    if n == "slt":
        return _ite(f"(bvslt {args[0]} {args[1]})")
    if n == "sgt":
        return _ite(f"(bvsgt {args[0]} {args[1]})")
    if n == "eq":
        return _ite(f"(= {args[0]} {args[1]})")
    if n == "iszero":
        return _ite(f"(= {args[0]} {ZERO_BV})")
    if n == "and":
        return f"(bvand {args[0]} {args[1]})"
    if n == "or":
        return f"(bvor {args[0]} {args[1]})"
    if n == "xor":
        return f"(bvxor {args[0]} {args[1]})"
    if n == "not":
        return f"(bvnot {args[0]})"
    if n == "byte":
        i, x = args
        shift = f"(bvmul (bvsub {bv_literal(31)} {i}) {bv_literal(8)})"
        picked = f"(bvand (bvlshr {x} {shift}) {bv_literal(0xFF)})"
        return f"(ite (bvuge {i} {bv_literal(WORD_BYTES)}) {ZERO_BV} {picked})"
    if n == "shl":
        return f"(bvshl {args[1]} {args[0]})"
    if n == "shr":
        return f"(bvlshr {args[1]} {args[0]})"
    if n == "sar":
        return f"(bvashr {args[1]} {args[0]})"
    raise ValueError(f"no encoding for operation {n}")


def uf_name(length: int) -> str:
    return f"keccak_{length}"


def _hash_args(h: Hash, names: Dict[bytes, str]) -> List[str]:
    args = [names[a.fp] for a in h.args]
    tail = h.length % WORD_BYTES
    if tail and args:
        # only the first `tail` bytes of the last word are hashed
        mask = (UINT256_MASK << (8 * (WORD_BYTES - tail))) & UINT256_MASK
        args[-1] = f"(bvand {args[-1]} {bv_literal(mask)})"
    return args


@dataclass
class Query:
    """Declarations and assertions for one satisfiability check."""

    declarations: List[str] = field(default_factory=list)
    assertions: List[str] = field(default_factory=list)
    variables: List[str] = field(default_factory=list)
    hashes: List[str] = field(default_factory=list)

    def commands(self) -> List[str]:
        return self.declarations + [f"(assert {a})" for a in self.assertions]

    def text(self) -> str:
        lines = [f"(set-logic {LOGIC})"] + self.commands() + ["(check-sat)", ""]
        return "\n".join(lines)


class SmtEncoder:
    """Stateless translation; one instance can encode many queries."""

    def encode_bool(self, v: SymValue, names: Dict[bytes, str]) -> str:
        """Boolean term that holds iff the word v is nonzero."""
        if isinstance(v, Const):
            return "true" if v.value else "false"
        if isinstance(v, Op):
            a = [names[x.fp] for x in v.args]
            if v.name == "iszero":
                return f"(not {self.encode_bool(v.args[0], names)})"
            if v.name == "eq":
                return f"(= {a[0]} {a[1]})"
            if v.name == "lt":
                return f"(bvult {a[0]} {a[1]})"
            if v.name == "gt":
                return f"(bvugt {a[0]} {a[1]})"
            if v.name == "slt":
                return f"(bvslt {a[0]} {a[1]})"
            if v.name == "sgt":
                return f"(bvsgt {a[0]} {a[1]})"
            if v.name in ("and", "or") and all(is_boolean(x) for x in v.args):
                parts = " ".join(self.encode_bool(x, names) for x in v.args)
                return f"({v.name} {parts})"
        return f"(distinct {names[v.fp]} {ZERO_BV})"

    def encode(self, constraints: Sequence[SymValue]) -> Query:
        q = Query()
        names: Dict[bytes, str] = {}
        ufs: Set[int] = set()
        for node in walk(constraints):
            if isinstance(node, Const):
                names[node.fp] = bv_literal(node.value)
            elif isinstance(node, Var):
                names[node.fp] = node.name
                q.declarations.append(f"(declare-const {node.name} {BV256})")
                q.variables.append(node.name)
            elif isinstance(node, Hash):
                arity = len(node.args)
                if node.length not in ufs:
                    ufs.add(node.length)
                    sig = " ".join([BV256] * arity)
                    q.declarations.append(f"(declare-fun {uf_name(node.length)} ({sig}) {BV256})")
                names[node.fp] = node.name
                q.declarations.append(f"(declare-const {node.name} {BV256})")
                applied = f"({uf_name(node.length)} {' '.join(_hash_args(node, names))})"
                q.assertions.append(f"(= {node.name} {applied})")
                q.hashes.append(node.name)
            else:
                name = node_name(node)
                term = _op_term(node, [names[a.fp] for a in node.args])
                q.declarations.append(f"(define-fun {name} () {BV256} {term})")
                names[node.fp] = name
        for c in constraints:
            q.assertions.append(self.encode_bool(c, names))
        return q


def encode(constraints: Sequence[SymValue]) -> str:
    """Full SMT-LIB2 script (logic, declarations, assertions, check-sat)."""
    return SmtEncoder().encode(constraints).text()
