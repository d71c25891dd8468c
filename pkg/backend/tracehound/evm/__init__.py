"""Concrete EVM interpreter producing labeled, projected traces."""

from tracehound.evm.labels import (
    INTERNAL,
    Call,
    ContractView,
    DelegateCall,
    Internal,
    Label,
    LabelKind,
    SLoad,
    SStore,
    Suicide,
    Trace,
    TraceEntry,
    describe,
)
from tracehound.evm.interpreter import (
    DEFAULT_BLOCK_INTERVAL_S,
    DEFAULT_STEP_LIMIT,
    GAS_REMAINING,
    ActivationRecord,
    Configuration,
    HaltKind,
    Interpreter,
    initial_configuration,
    run_sequence,
    run_transaction,
    step,
)

__all__ = [
    "INTERNAL",
    "Call",
    "ContractView",
    "DelegateCall",
    "Internal",
    "Label",
    "LabelKind",
    "SLoad",
    "SStore",
    "Suicide",
    "Trace",
    "TraceEntry",
    "describe",
    "DEFAULT_BLOCK_INTERVAL_S",
    "DEFAULT_STEP_LIMIT",
    "GAS_REMAINING",
    "ActivationRecord",
    "Configuration",
    "HaltKind",
    "Interpreter",
    "initial_configuration",
    "run_sequence",
    "run_transaction",
    "step",
]
