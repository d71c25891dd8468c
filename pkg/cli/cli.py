import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from importlib import metadata as importlib_metadata

from . import __version__ as _PACKAGE_FALLBACK_VERSION

# From a checkout the import package lives under backend/.
_BACKEND_DIR = Path(__file__).resolve().parents[1] / "backend"
if _BACKEND_DIR.is_dir() and str(_BACKEND_DIR) not in sys.path:
    sys.path.insert(0, str(_BACKEND_DIR))

from tracehound.bytecode import BYTECODE_FORMATS, load_bytecode  # noqa: E402
from tracehound.chainstate import ChainState, format_address, load_snapshot, parse_address, scan_posthumous, state_digest  # noqa: E402
from tracehound.config import (  # noqa: E402
    ALL_CATEGORIES,
    KNOWN_VARIABLES,
    AnalysisConfig,
    Category,
    ReplayMode,
    ValidationConfig,
    get_workers,
    load_env_files,
)
from tracehound.errors import TraceHoundError  # noqa: E402
from tracehound.paths import get_report_path  # noqa: E402
from tracehound.schemas.report import ContractReport, CorpusReport  # noqa: E402

logger = logging.getLogger("tracehound.cli")

LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"


class _HelpOnErrorParser(argparse.ArgumentParser):
    """
    An argparse parser that prints help text on any parsing error.
    """

    def error(self, message: str) -> None:
        sys.stderr.write(f"error: {message}\n\n")
        self.print_help(sys.stderr)
        self.exit(2)


class _UsageError(Exception):
    """A flag combination or input the command cannot work with."""


def configure_logging(verbosity: int = 0) -> None:
    """WARNING by default, -v INFO, -vv DEBUG; TRACEHOUND_LOG_LEVEL wins."""
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    env_level = (os.getenv("TRACEHOUND_LOG_LEVEL") or "").strip().upper()
    if env_level:
        resolved = logging.getLevelName(env_level)
        if isinstance(resolved, int):
            level = resolved
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def _positive_int(raw: str) -> int:
    try:
        value = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {raw!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _positive_float(raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {raw!r}")
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {raw}")
    return value


def _categories(choice: str) -> Tuple[Category, ...]:
    if choice == "all":
        return ALL_CATEGORIES
    return (Category(choice),)


def _add_common_env_help(parser: argparse.ArgumentParser) -> None:
    width = max(len(k) for k in KNOWN_VARIABLES) + 2
    lines = [f"  {name:<{width}}{text}" for name, text in KNOWN_VARIABLES.items()]
    parser.epilog = "Environment variables:\n" + "\n".join(lines) + "\n"


def _add_analysis_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--category",
        choices=[c.value for c in ALL_CATEGORIES] + ["all"],
        default="all",
        help="Property to search for (default: all)",
    )
    p.add_argument("--depth", type=_positive_int, help="Invocation depth k (default 3)")
    p.add_argument("--max-cfg-nodes", type=_positive_int, help="Jumps per invocation before a path is cut (default 60)")
    p.add_argument("--max-call-depth", type=_positive_int, help="Calls per invocation before a path is cut (default 3)")
    p.add_argument("--solver-timeout", type=_positive_float, help="Seconds per solver query (default 10)")
    p.add_argument("--max-time", type=_positive_float, help="Seconds per contract and category (default 300)")
    p.add_argument("--array-bound", type=_positive_int, help="Witnesses per dynamic array access (default 2)")
    p.add_argument("--solver-path", help="SMT solver executable (default: z3 on PATH)")
    p.add_argument("--validate", action="store_true", help="Replay every candidate on a sandbox fork")
    p.add_argument(
        "--alternate-snapshot",
        action="append",
        default=[],
        metavar="ADDRESS=PATH",
        help="Earlier snapshot in which ADDRESS is still alive, for replaying a dead subject (repeatable)",
    )
    p.add_argument(
        "--replay-mode",
        choices=[m.value for m in ReplayMode],
        default=ReplayMode.AUTO.value,
        help="Block context used when replaying candidates (default: auto)",
    )
    p.add_argument("--depth-sweep", action="store_true", help="Also report flags at every depth 1..k")
    p.add_argument("--workers", type=_positive_int, help="Worker count (default: TRACEHOUND_WORKERS or CPU count)")
    p.add_argument("--out", help="Report JSON path (default: <reports dir>/<name>.json)")
    p.add_argument(
        "--fail-on-findings",
        action="store_true",
        help="Exit 1 when any candidate validates TruePositive",
    )


def _analysis_config(args: argparse.Namespace) -> AnalysisConfig:
    return AnalysisConfig.from_env(
        invocation_depth=args.depth,
        max_cfg_nodes=args.max_cfg_nodes,
        max_call_depth=args.max_call_depth,
        solver_timeout_s=args.solver_timeout,
        max_analysis_time_s=args.max_time,
        array_bound=args.array_bound,
        solver_path=args.solver_path,
    )


def _validation_config(args: argparse.Namespace) -> ValidationConfig:
    return ValidationConfig(replay_mode=ReplayMode(args.replay_mode))


def _load_start(snapshot: Optional[str]) -> ChainState:
    if not snapshot:
        return ChainState()
    return load_snapshot(snapshot)


def _alternates(args: argparse.Namespace) -> Dict[int, ChainState]:
    """Parse every --alternate-snapshot ADDRESS=PATH into address -> snapshot."""
    if args.alternate_snapshot and not args.validate:
        raise _UsageError("--alternate-snapshot needs --validate")
    alternates: Dict[int, ChainState] = {}
    for entry in args.alternate_snapshot:
        raw_address, sep, path = entry.partition("=")
        if not sep or not path:
            raise _UsageError(f"--alternate-snapshot expects ADDRESS=PATH, got {entry!r}")
        try:
            address = parse_address(raw_address)
        except ValueError as exc:
            raise _UsageError(f"--alternate-snapshot {entry!r}: {exc}")
        if address in alternates:
            raise _UsageError(f"--alternate-snapshot given twice for {format_address(address)}")
        alternates[address] = load_snapshot(path)
    return alternates


def _write_report(report: CorpusReport, out: Optional[str], name: str) -> Path:
    path = Path(out).expanduser() if out else get_report_path(name)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def _print_contract(tag: str, r: ContractReport) -> None:
    name = r.source or r.address or "?"
    if r.error:
        sys.stdout.write(f"[{tag}] {name}: error: {r.error}\n")
        return
    for res in r.results:
        status = "flagged" if res.flagged else "clean"
        verdicts = ", ".join(v["status"] for v in res.verdicts)
        extra = f" [{verdicts}]" if verdicts else ""
        if res.exploration.skipped:
            extra += f" (skipped: {res.exploration.skipped})"
        elif res.exploration.incomplete:
            extra += " (incomplete)"
        sys.stdout.write(f"[{tag}] {name} {r.address} {res.category}: {status}{extra}\n")


def _finish(tag: str, args: argparse.Namespace, report: CorpusReport, name: str, categories: Sequence[Category]) -> int:
    from tracehound.services import has_true_positive, render_depth_table, render_summary

    path = _write_report(report, args.out, name)
    sys.stdout.write("\n" + render_summary(report.summary))
    if args.depth_sweep:
        table = render_depth_table(report.contracts, categories)
        if table:
            sys.stdout.write("\n" + table)
    sys.stdout.write(f"[{tag}] report written to {path}\n")
    if args.fail_on_findings and has_true_positive(report.contracts):
        return 1
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    from tracehound.services import analyze_contract, build_report, place_contract

    if args.address and not args.snapshot:
        raise _UsageError("--address needs --snapshot")
    categories = _categories(args.category)
    cfg = _analysis_config(args)
    start = _load_start(args.snapshot)
    alternates = _alternates(args)

    if args.bytecode:
        code = load_bytecode(args.bytecode, args.bytecode_format)
        if not code:
            raise _UsageError(f"{args.bytecode} holds no bytecode")
        stem = Path(args.bytecode).stem
        state, subject = place_contract(start, code, stem)
        source, name = Path(args.bytecode).name, stem
    else:
        try:
            subject = parse_address(args.address)
        except ValueError as exc:
            raise _UsageError(str(exc))
        if not start.is_contract(subject):
            raise _UsageError(f"{format_address(subject)} has no code in {args.snapshot}")
        state, source, name = start, None, format_address(subject)

    sys.stdout.write(
        f"[analyze] {format_address(subject)}: {', '.join(c.value for c in categories)} at depth {cfg.invocation_depth}\n"
    )
    contract = analyze_contract(
        state,
        subject,
        categories,
        cfg,
        validate=args.validate,
        validation=_validation_config(args),
        sweep=args.depth_sweep,
        source=source,
        validation_workers=args.workers or 1,
        snapshot=start,
        alternates=alternates,
    )
    _print_contract("analyze", contract)
    report = build_report([contract], categories, cfg, snapshot_digest=state_digest(start))
    rc = _finish("analyze", args, report, name, categories)
    if contract.error:
        sys.stderr.write(f"error: {contract.error}\n")
        return 2
    return rc


def cmd_corpus(args: argparse.Namespace) -> int:
    from tracehound.services import build_report, run_corpus

    categories = _categories(args.category)
    cfg = _analysis_config(args)
    start = _load_start(args.snapshot)
    alternates = _alternates(args)
    workers = args.workers or get_workers()
    sys.stdout.write(f"[corpus] {args.directory} with {workers} worker(s)\n")
    try:
        contracts = run_corpus(
            args.directory,
            start,
            categories,
            cfg,
            workers=workers,
            validate=args.validate,
            validation=_validation_config(args),
            sweep=args.depth_sweep,
            alternates=alternates,
        )
    except NotADirectoryError as exc:
        raise _UsageError(str(exc))
    for contract in contracts:
        _print_contract("corpus", contract)
    report = build_report(contracts, categories, cfg, snapshot_digest=state_digest(start))
    return _finish("corpus", args, report, Path(args.directory).name or "corpus", categories)


def cmd_scan_posthumous(args: argparse.Namespace) -> int:
    start = load_snapshot(args.snapshot)
    found = [format_address(a) for a in scan_posthumous(start)]
    for address in found:
        sys.stdout.write(f"[posthumous] {address} balance={start.balance(parse_address(address))}\n")
    sys.stdout.write(f"[posthumous] {len(found)} of {len(start.accounts)} account(s)\n")
    if args.out:
        path = Path(args.out).expanduser()
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps({"addresses": found}, indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_fixtures(args: argparse.Namespace) -> int:
    from tracehound.fixtures import FIXTURES, export_fixtures

    if args.export:
        written = export_fixtures(args.export)
        sys.stdout.write(f"[fixtures] wrote {len(written)} file(s) to {args.export}\n")
        return 0
    for f in FIXTURES.values():
        expected = ", ".join(
            f"{e.category.value}@{e.deepest}={e.expect_verdict or 'unflagged'}" for e in f.expectations()
        )
        sys.stdout.write(f"[fixtures] {f.name:<18} {format_address(f.address)}  {expected}\n")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    # Import lazily to keep `tracehound --help` fast
    import uvicorn

    sys.stdout.write(f"[serve] http://{args.host}:{args.port}/health\n")
    uvicorn.run("tracehound.server:app", host=args.host, port=int(args.port), reload=bool(args.reload))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _HelpOnErrorParser(prog="tracehound", description="Symbolic trace analysis for EVM contracts")
    parser.add_argument("--version", action="version", version=f"%(prog)s {_get_distribution_version()}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logs")
    sub = parser.add_subparsers(dest="command", parser_class=_HelpOnErrorParser)

    p_analyze = sub.add_parser("analyze", help="Analyze one contract")
    source = p_analyze.add_mutually_exclusive_group(required=True)
    source.add_argument("--bytecode", help="Runtime bytecode file (.bin is raw bytes, anything else hex text)")
    source.add_argument("--address", help="Analyze the contract at this address in --snapshot")
    p_analyze.add_argument("--snapshot", help="Chain snapshot JSON (default: an empty chain)")
    p_analyze.add_argument(
        "--bytecode-format",
        choices=BYTECODE_FORMATS,
        help="Read --bytecode as hex text or raw bytes whatever its suffix",
    )
    _add_analysis_flags(p_analyze)
    p_analyze.set_defaults(func=cmd_analyze)

    p_corpus = sub.add_parser("corpus", help="Analyze every *.hex / *.bin file in a directory")
    p_corpus.add_argument("directory", help="Directory of bytecode files")
    p_corpus.add_argument("--snapshot", help="Chain snapshot JSON shared by every contract")
    _add_analysis_flags(p_corpus)
    p_corpus.set_defaults(func=cmd_corpus)

    p_post = sub.add_parser("scan-posthumous", help="List codeless accounts that still hold Ether")
    p_post.add_argument("--snapshot", required=True, help="Chain snapshot JSON")
    p_post.add_argument("--out", help="Write the address list as JSON")
    p_post.set_defaults(func=cmd_scan_posthumous)

    p_fix = sub.add_parser("fixtures", help="List the fixture corpus or export it")
    p_fix.add_argument("--export", metavar="DIR", help="Write bytecode, snapshots and expected verdicts to DIR")
    p_fix.set_defaults(func=cmd_fixtures)

    p_serve = sub.add_parser("serve", help="Start the analysis API")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=int(os.getenv("PORT", "8000")))
    p_serve.add_argument("--reload", action="store_true", help="Enable auto-reload (dev)")
    p_serve.set_defaults(func=cmd_serve)

    _add_common_env_help(parser)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "command", None):
        parser.print_help()
        return 2
    load_env_files()
    configure_logging(args.verbose)
    try:
        return int(args.func(args))
    except _UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (TraceHoundError, OSError) as exc:
        logger.debug("command failed", exc_info=True)
        sys.stderr.write(f"error: {exc}\n")
        return 2


def _get_distribution_version() -> str:
    """
    Return the installed distribution version of `tracehound`.

    Falls back to package __version__ for editable/dev scenarios where distribution
    metadata isn't available.
    """
    try:
        return str(importlib_metadata.version("tracehound"))
    except importlib_metadata.PackageNotFoundError:
        return str(_PACKAGE_FALLBACK_VERSION)
    except Exception:
        return str(_PACKAGE_FALLBACK_VERSION)
