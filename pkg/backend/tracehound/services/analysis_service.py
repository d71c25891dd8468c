"""Analysis orchestration: explore, validate and report one contract."""

import logging
from typing import Dict, Iterable, List, Optional, Sequence

from tracehound import __version__
from tracehound.bytecode import Program, decode
from tracehound.chainstate.state import ChainState, format_address
from tracehound.config.settings import AnalysisConfig, Category, ValidationConfig
from tracehound.errors import TraceHoundError
from tracehound.schemas.report import (
    CategoryResult,
    CategorySummary,
    ContractReport,
    CorpusReport,
    CorpusSummary,
    ExplorationSummary,
)
from tracehound.symbolic.candidate import ExplorationResult
from tracehound.symbolic.engine import explore_with_stats
from tracehound.validation import ValidationRunner, VerdictStatus

logger = logging.getLogger(__name__)

_VALIDATED = (VerdictStatus.TRUE_POSITIVE.value, VerdictStatus.FALSE_POSITIVE.value)


def exploration_summary(result: ExplorationResult) -> ExplorationSummary:
    return ExplorationSummary(**result.stats.to_dict(), incomplete=result.incomplete, skipped=result.skipped)


def depth_sweep(program: Program, start: ChainState, subject: int, cfg: AnalysisConfig) -> Dict[int, bool]:
    """Flagged or not at every invocation depth 1..cfg.invocation_depth."""
    return {
        depth: bool(explore_with_stats(program, start, subject, cfg.with_depth(depth)).candidates)
        for depth in range(1, cfg.invocation_depth + 1)
    }


def is_dead(snapshot: ChainState, subject: int, alternates: Optional[Dict[int, ChainState]] = None) -> bool:
    """The subject has no code in `snapshot` but existed, there or in an earlier snapshot."""
    if snapshot.is_contract(subject):
        return False
    return snapshot.get(subject) is not None or subject in (alternates or {})


def analyze_category(
    program: Program,
    start: ChainState,
    subject: int,
    cfg: AnalysisConfig,
    runner: Optional[ValidationRunner] = None,
    sweep: bool = False,
    replay_start: Optional[ChainState] = None,
) -> CategoryResult:
    """
    One category on one subject. With a runner every candidate is replayed,
    on `replay_start` when given and on `start` otherwise; with `sweep` the
    shallower depths are explored too and the deepest run supplies the
    candidates.
    """
    flags: Optional[Dict[int, bool]] = None
    if sweep and cfg.invocation_depth > 1:
        flags = depth_sweep(program, start, subject, cfg.with_depth(cfg.invocation_depth - 1))
    result = explore_with_stats(program, start, subject, cfg)
    if sweep:
        flags = dict(flags or {})
        flags[cfg.invocation_depth] = bool(result.candidates)

    verdicts = []
    if runner is not None and result.candidates:
        replay = start if replay_start is None else replay_start
        verdicts = [v.to_dict() for v in runner.run(replay, result.candidates)]
        for v in verdicts:
            logger.info("%s candidate on %s: %s (%s)", cfg.category.value, v["subject"], v["status"], v["reason"])

    return CategoryResult(
        category=cfg.category.value,
        flagged=bool(result.candidates),
        candidates=[c.to_dict() for c in result.candidates],
        verdicts=verdicts,
        exploration=exploration_summary(result),
        depth_sweep=flags,
    )


def analyze_contract(
    start: ChainState,
    subject: int,
    categories: Iterable[Category],
    cfg: AnalysisConfig,
    validate: bool = False,
    validation: Optional[ValidationConfig] = None,
    sweep: bool = False,
    source: Optional[str] = None,
    validation_workers: int = 1,
    snapshot: Optional[ChainState] = None,
    alternates: Optional[Dict[int, ChainState]] = None,
) -> ContractReport:
    """
    Analyze the contract at `subject` in `start` for each category.

    `snapshot` is the chain as loaded, before any code was placed in it.
    When the subject is dead there, candidates are replayed on it rather
    than on `start`, and so on the subject's entry in `alternates` if one
    was supplied.

    Load and analysis failures are reported in the `error` field rather than
    raised, so a corpus run carries on past a broken contract.
    """
    report = ContractReport(address=format_address(subject), source=source)
    code = start.code(subject)
    if not code:
        report.error = f"account {format_address(subject)} has no code"
        return report
    program = decode(code)
    report.bytecode_digest = program.digest

    runner = None
    replay_start: Optional[ChainState] = None
    if validate:
        runner = ValidationRunner(validation, workers=validation_workers, alternates=alternates)
        if snapshot is not None and is_dead(snapshot, subject, alternates):
            logger.info("%s is dead in the snapshot; replaying there", report.address)
            replay_start = snapshot
    try:
        for category in categories:
            report.results.append(
                analyze_category(program, start, subject, cfg.for_category(category), runner, sweep, replay_start)
            )
    except TraceHoundError as exc:
        logger.error("analysis of %s failed: %s", report.address, exc)
        report.error = str(exc)
        report.results = []
    return report


def has_true_positive(reports: Iterable[ContractReport]) -> bool:
    return any(
        v.get("status") == VerdictStatus.TRUE_POSITIVE.value
        for r in reports
        for res in r.results
        for v in res.verdicts
    )


def summarize(reports: Sequence[ContractReport], categories: Iterable[Category]) -> CorpusSummary:
    """Summary table counts, recomputed from the per-contract records."""
    rows: List[CategorySummary] = []
    for category in categories:
        flagged = [r for r in reports if (res := r.result(category.value)) is not None and res.flagged]
        digests = {r.bytecode_digest for r in flagged}
        statuses = [
            v.get("status")
            for r in reports
            if (res := r.result(category.value)) is not None
            for v in res.verdicts
        ]
        validated = sum(1 for s in statuses if s in _VALIDATED)
        tps = sum(1 for s in statuses if s == VerdictStatus.TRUE_POSITIVE.value)
        rows.append(
            CategorySummary(
                category=category.value,
                flagged=len(flagged),
                distinct_by_digest=len(digests),
                validated=validated,
                true_positives=tps,
                true_positive_rate=(tps / validated) if validated else None,
            )
        )
    return CorpusSummary(
        contracts=len(reports),
        errors=sum(1 for r in reports if r.error),
        categories=rows,
    )


def build_report(
    reports: Sequence[ContractReport],
    categories: Sequence[Category],
    cfg: AnalysisConfig,
    snapshot_digest: Optional[str] = None,
) -> CorpusReport:
    return CorpusReport(
        version=__version__,
        snapshot_digest=snapshot_digest,
        config=cfg.model_dump(mode="json", exclude={"category", "solver_path"}),
        contracts=list(reports),
        summary=summarize(reports, categories),
    )


def render_summary(summary: CorpusSummary) -> str:
    """Plain-text summary table: one row per category."""
    header = f"{'Category':<10} {'Flagged':>8} {'Distinct':>9} {'Validated':>10} {'TP %':>7}"
    lines = [header, "-" * len(header)]
    for row in summary.categories:
        rate = f"{100 * row.true_positive_rate:.1f}" if row.true_positive_rate is not None else "-"
        lines.append(
            f"{row.category:<10} {row.flagged:>8} {row.distinct_by_digest:>9} {row.validated:>10} {rate:>7}"
        )
    lines.append(f"{summary.contracts} contract(s), {summary.errors} error(s)")
    return "\n".join(lines) + "\n"


def render_depth_table(reports: Sequence[ContractReport], categories: Iterable[Category]) -> str:
    """Contracts flagged per invocation depth, for reports built with a sweep."""
    cats = list(categories)
    depths = sorted(
        {d for r in reports for res in r.results if res.depth_sweep for d in res.depth_sweep}
    )
    if not depths:
        return ""
    header = f"{'Depth':<6}" + "".join(f"{c.value:>10}" for c in cats)
    lines = [header, "-" * len(header)]
    for d in depths:
        counts = []
        for c in cats:
            n = 0
            for r in reports:
                res = r.result(c.value)
                if res is not None and res.depth_sweep and res.depth_sweep.get(d):
                    n += 1
            counts.append(n)
        lines.append(f"{d:<6}" + "".join(f"{n:>10}" for n in counts))
    return "\n".join(lines) + "\n"
