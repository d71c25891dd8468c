"""Corpus runs: every bytecode file in a directory against one snapshot."""

import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from eth_utils import keccak

from tracehound.bytecode import load_bytecode
from tracehound.chainstate.state import AccountState, ChainState, parse_address, with_account
from tracehound.config.settings import AnalysisConfig, Category, ValidationConfig
from tracehound.errors import TraceHoundError
from tracehound.schemas.report import ContractReport
from tracehound.services.analysis_service import analyze_contract

logger = logging.getLogger(__name__)

BYTECODE_SUFFIXES = (".hex", ".bin")


def discover_bytecode_files(directory: Union[str, Path]) -> List[Path]:
    root = Path(directory)
    if not root.is_dir():
        raise NotADirectoryError(f"not a directory: {root}")
    return sorted(p for p in root.iterdir() if p.is_file() and p.suffix.lower() in BYTECODE_SUFFIXES)


def corpus_address(stem: str) -> int:
    """Address for a file named after no account: last 20 bytes of keccak(stem)."""
    return int.from_bytes(keccak(text=f"tracehound-corpus:{stem}")[-20:], "big")


def place_contract(start: ChainState, code: bytes, stem: str) -> Tuple[ChainState, int]:
    """
    Find or install `code` in `start`.

    A stem that is an address names the account; its balance and storage are
    kept and its code is replaced when it differs. Otherwise an account with
    identical code is reused, and failing that the code is installed, with
    no balance, at `corpus_address(stem)`.
    """
    try:
        named: Optional[int] = parse_address(stem)
    except ValueError:
        named = None
    if named is not None:
        existing = start.get(named)
        if existing is not None and existing.code == code:
            return start, named
        base = existing.copy() if existing is not None else AccountState()
        return with_account(start, named, AccountState(base.balance, code, base.storage)), named
    for address, acct in start.items():
        if acct.code == code:
            return start, address
    address = corpus_address(stem)
    return with_account(start, address, AccountState(0, code, {})), address


def analyze_file(
    path: Union[str, Path],
    start: ChainState,
    categories: Sequence[Category],
    cfg: AnalysisConfig,
    validate: bool = False,
    validation: Optional[ValidationConfig] = None,
    sweep: bool = False,
    alternates: Optional[Dict[int, ChainState]] = None,
) -> ContractReport:
    path = Path(path)
    try:
        code = load_bytecode(path)
    except (OSError, TraceHoundError) as exc:
        logger.error("cannot load %s: %s", path, exc)
        return ContractReport(source=path.name, error=f"load failed: {exc}")
    if not code:
        return ContractReport(source=path.name, error="load failed: empty bytecode")
    state, address = place_contract(start, code, path.stem)
    return analyze_contract(
        state,
        address,
        categories,
        cfg,
        validate=validate,
        validation=validation,
        sweep=sweep,
        source=path.name,
        snapshot=start,
        alternates=alternates,
    )


def _sort_key(report: ContractReport) -> Tuple[str, str]:
    return report.address or "", report.source or ""


def run_corpus(
    directory: Union[str, Path],
    start: ChainState,
    categories: Sequence[Category],
    cfg: AnalysisConfig,
    workers: int = 1,
    validate: bool = False,
    validation: Optional[ValidationConfig] = None,
    sweep: bool = False,
    alternates: Optional[Dict[int, ChainState]] = None,
) -> List[ContractReport]:
    """Reports for every bytecode file, sorted by address whatever the worker count."""
    files = discover_bytecode_files(directory)
    logger.info("corpus of %d file(s) with %d worker(s)", len(files), workers)
    if workers <= 1 or len(files) <= 1:
        reports = [analyze_file(p, start, categories, cfg, validate, validation, sweep, alternates) for p in files]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(analyze_file, p, start, list(categories), cfg, validate, validation, sweep, alternates)
                for p in files
            ]
            reports = []
            for p, future in zip(files, futures):
                try:
                    reports.append(future.result())
                except Exception as exc:
                    logger.exception("worker failed on %s", p)
                    reports.append(ContractReport(source=p.name, error=f"worker failed: {exc}"))
    return sorted(reports, key=_sort_key)
