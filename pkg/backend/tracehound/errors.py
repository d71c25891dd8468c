"""Exception hierarchy shared by every tracehound module."""

from typing import Optional


class TraceHoundError(Exception):
    """Base class for all tracehound errors."""


class MalformedSnapshot(TraceHoundError, ValueError):
    """Snapshot JSON violates the schema."""


class DuplicateAddress(MalformedSnapshot):
    """The same account address appears twice in one snapshot."""

    def __init__(self, address: str):
        super().__init__(f"duplicate account address in snapshot: {address}")
        self.address = address


class BytecodeFormatError(TraceHoundError, ValueError):
    """Bytecode input is not in the format its file or request declares."""


class AssemblyError(TraceHoundError, ValueError):
    """Assembler source could not be translated."""


class NotAContract(TraceHoundError):
    """A message targets an account without code."""

    def __init__(self, address: int):
        super().__init__(f"account 0x{address:040x} has no code")
        self.address = address


class UnimplementedOpcode(TraceHoundError):
    """Execution reached an opcode tagged unimplemented in the support matrix."""

    def __init__(self, byte: int, mnemonic: Optional[str] = None):
        label = mnemonic or f"0x{byte:02x}"
        super().__init__(f"unimplemented opcode {label}")
        self.byte = byte
        self.mnemonic = mnemonic


class Halt(TraceHoundError):
    """Exceptional end of a transaction; carries a HaltKind."""

    def __init__(self, kind, reason: str = ""):
        super().__init__(f"{kind.value}: {reason}" if reason else kind.value)
        self.kind = kind
        self.reason = reason


class UnsupportedExpression(TraceHoundError):
    """A symbolic operand the bitvector encoding cannot express."""


class SolverUnavailable(TraceHoundError):
    """The SMT solver binary is missing or died."""


class AnalysisTimeout(TraceHoundError):
    """Wall-clock budget of an exploration ran out."""
