"""Chain state sandbox: accounts, blocks, messages and JSON snapshots."""

from tracehound.chainstate.state import (
    AccountState,
    Address,
    BlockContext,
    ChainState,
    Message,
    blockhash,
    fork,
    format_address,
    parse_address,
    scan_posthumous,
    total_balance,
    with_account,
)
from tracehound.chainstate.snapshot import (
    dump_snapshot,
    load_snapshot,
    parse_snapshot,
    save_snapshot,
    snapshot_document,
    state_digest,
)

__all__ = [
    "AccountState",
    "Address",
    "BlockContext",
    "ChainState",
    "Message",
    "blockhash",
    "fork",
    "format_address",
    "parse_address",
    "scan_posthumous",
    "total_balance",
    "with_account",
    "dump_snapshot",
    "load_snapshot",
    "parse_snapshot",
    "save_snapshot",
    "snapshot_document",
    "state_digest",
]
