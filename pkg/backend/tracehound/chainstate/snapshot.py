"""Loading and saving JSON chain snapshots."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

from eth_utils import keccak
from pydantic import ValidationError

from tracehound.chainstate.state import AccountState, BlockContext, ChainState, format_address, parse_address
from tracehound.errors import DuplicateAddress, MalformedSnapshot
from tracehound.schemas.snapshot import SnapshotSchema

logger = logging.getLogger(__name__)


def _reject_duplicates(pairs: List[Tuple[str, Any]]) -> Dict[str, Any]:
    seen: Dict[str, Any] = {}
    for key, value in pairs:
        if key in seen:
            if key.startswith("0x") and len(key) == 42:
                raise DuplicateAddress(key.lower())
            raise MalformedSnapshot(f"duplicate key {key!r}")
        seen[key] = value
    return seen


def _hex_bytes(text: str) -> bytes:
    return bytes.fromhex(text[2:])


def parse_snapshot(doc: Union[str, bytes, Dict[str, Any]]) -> ChainState:
    """Build a ChainState from snapshot JSON text or an already-decoded document."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc, object_pairs_hook=_reject_duplicates)
        except json.JSONDecodeError as exc:
            raise MalformedSnapshot(f"snapshot is not valid JSON: {exc}") from exc
    try:
        schema = SnapshotSchema.model_validate(doc)
    except ValidationError as exc:
        raise MalformedSnapshot(str(exc)) from exc

    block = BlockContext(
        number=schema.block.number,
        timestamp=schema.block.timestamp,
        coinbase=parse_address(schema.block.coinbase),
        blockhash_seed=int(schema.block.blockhashSeed, 16),
    )
    accounts: Dict[int, AccountState] = {}
    for key, entry in schema.accounts.items():
        address = parse_address(key)
        if address in accounts:
            raise DuplicateAddress(format_address(address))
        storage = {int(k, 16): int(v, 16) for k, v in (entry.storage or {}).items()}
        code = _hex_bytes(entry.code) if entry.code is not None else None
        accounts[address] = AccountState(int(entry.balance, 16), code, storage)
    logger.debug("parsed snapshot at block %d with %d accounts", block.number, len(accounts))
    return ChainState(accounts, block)


def load_snapshot(path: Union[str, Path]) -> ChainState:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedSnapshot(f"cannot read snapshot {p}: {exc}") from exc
    return parse_snapshot(text)


def snapshot_document(s: ChainState) -> Dict[str, Any]:
    accounts: Dict[str, Any] = {}
    for address, acct in s.items():
        entry: Dict[str, Any] = {"balance": hex(acct.balance)}
        if acct.code is not None:
            entry["code"] = "0x" + acct.code.hex()
        if acct.storage:
            entry["storage"] = {hex(k): hex(v) for k, v in sorted(acct.storage.items())}
        accounts[format_address(address)] = entry
    return {
        "block": {
            "number": s.block.number,
            "timestamp": s.block.timestamp,
            "coinbase": format_address(s.block.coinbase),
            "blockhashSeed": hex(s.block.blockhash_seed),
        },
        "accounts": accounts,
    }


def dump_snapshot(s: ChainState) -> str:
    """Canonical serialization: sorted keys, minimal hex quantities."""
    return json.dumps(snapshot_document(s), indent=2, sort_keys=True) + "\n"


def save_snapshot(s: ChainState, path: Union[str, Path]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(dump_snapshot(s), encoding="utf-8")
    return p


def state_digest(s: ChainState) -> str:
    return "0x" + keccak(text=dump_snapshot(s)).hex()
