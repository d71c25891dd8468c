"""Tests for analysis orchestration and the summary tables."""

from tracehound import __version__
from tracehound.bytecode import decode
from tracehound.chainstate import AccountState, ChainState
from tracehound.config import AnalysisConfig, Category
from tracehound.errors import SolverUnavailable
from tracehound.fixtures import FIXTURE_BLOCK, get_fixture
from tracehound.schemas.report import CategoryResult, ContractReport
from tracehound.services import (
    analyze_category,
    analyze_contract,
    build_report,
    has_true_positive,
    is_dead,
    render_depth_table,
    render_summary,
    summarize,
)
from tracehound.symbolic import Candidate, ExplorationResult, ExplorationStats
from tracehound.validation import ValidationRunner

ALL = [Category.PRODIGAL, Category.SUICIDAL, Category.GREEDY]


def report(address, digest, category, flagged, statuses=(), sweep=None, error=None):
    result = CategoryResult(
        category=category.value,
        flagged=flagged,
        verdicts=[{"status": s} for s in statuses],
        depth_sweep=sweep,
    )
    return ContractReport(address=address, bytecode_digest=digest, results=[result], error=error)


class TestSummarize:
    """Counts recomputed from per-contract records."""

    def test_counts(self):
        reports = [
            report("0x01", "d1", Category.PRODIGAL, True, ["TruePositive"]),
            report("0x02", "d1", Category.PRODIGAL, True, ["FalsePositive"]),
            report("0x03", "d2", Category.PRODIGAL, True, ["NotValidatable"]),
            report("0x04", "d3", Category.PRODIGAL, False),
            ContractReport(source="broken.hex", error="load failed: bytecode is not a hex string"),
        ]
        summary = summarize(reports, [Category.PRODIGAL, Category.GREEDY])
        prodigal, greedy = summary.categories
        assert (prodigal.flagged, prodigal.distinct_by_digest) == (3, 2)
        assert (prodigal.validated, prodigal.true_positives) == (2, 1)
        assert prodigal.true_positive_rate == 0.5
        assert greedy.flagged == 0
        assert greedy.true_positive_rate is None
        assert (summary.contracts, summary.errors) == (5, 1)

    def test_render(self):
        reports = [report("0x01", "d1", Category.SUICIDAL, True, ["TruePositive"])]
        text = render_summary(summarize(reports, [Category.SUICIDAL, Category.GREEDY]))
        lines = text.splitlines()
        assert lines[0].split() == ["Category", "Flagged", "Distinct", "Validated", "TP", "%"]
        assert lines[2].split() == ["suicidal", "1", "1", "1", "100.0"]
        assert lines[3].split() == ["greedy", "0", "0", "0", "-"]
        assert lines[-1] == "1 contract(s), 0 error(s)"

    def test_true_positive_anywhere(self):
        assert has_true_positive([report("0x01", "d", Category.GREEDY, True, ["FalsePositive", "TruePositive"])])
        assert not has_true_positive([report("0x01", "d", Category.GREEDY, True, ["NotValidatable"])])
        assert not has_true_positive([])


class TestDepthTable:
    def test_flagged_per_depth(self):
        reports = [
            report("0x01", "a", Category.SUICIDAL, True, sweep={1: False, 2: True}),
            report("0x02", "b", Category.SUICIDAL, True, sweep={1: True, 2: True}),
        ]
        lines = render_depth_table(reports, [Category.SUICIDAL]).splitlines()
        assert lines[2].split() == ["1", "1"]
        assert lines[3].split() == ["2", "2"]

    def test_without_sweep(self):
        assert render_depth_table([report("0x01", "a", Category.SUICIDAL, True)], ALL) == ""


class TestAnalyzeContract:
    def test_account_without_code(self):
        r = analyze_contract(ChainState({}, FIXTURE_BLOCK), 0xDEAD, ALL, AnalysisConfig())
        assert r.error == "account 0x000000000000000000000000000000000000dead has no code"
        assert r.results == []

    def test_precondition_skip_needs_no_solver(self):
        f = get_fixture("stop_only")
        r = analyze_contract(f.snapshot(), f.address, [Category.SUICIDAL], AnalysisConfig(), validate=True)
        (result,) = r.results
        assert not result.flagged
        assert result.verdicts == []
        assert result.exploration.skipped == "precondition"
        assert r.bytecode_digest == decode(f.bytecode).digest

    def test_analysis_failure_is_reported(self, mocker):
        mocker.patch(
            "tracehound.services.analysis_service.explore_with_stats",
            side_effect=SolverUnavailable("no solver found"),
        )
        f = get_fixture("tap_nickname")
        r = analyze_contract(f.snapshot(), f.address, ALL, AnalysisConfig(), source="tap.hex")
        assert r.error == "no solver found"
        assert r.results == []
        assert r.source == "tap.hex"

    def test_sweep_records_every_depth(self, mocker):
        f = get_fixture("mortal_thing")

        def fake(program, start, subject, cfg):
            found = [Candidate(category=cfg.category, subject=subject)] if cfg.invocation_depth >= 2 else []
            return ExplorationResult(candidates=found, stats=ExplorationStats())

        mocker.patch("tracehound.services.analysis_service.explore_with_stats", side_effect=fake)
        cfg = AnalysisConfig(category=Category.SUICIDAL, invocation_depth=3)
        result = analyze_category(decode(f.bytecode), f.snapshot(), f.address, cfg, sweep=True)
        assert result.depth_sweep == {1: False, 2: True, 3: True}
        assert result.flagged
        assert len(result.candidates) == 1


class TestBuildReport:
    def test_document(self):
        reports = [report("0x01", "d1", Category.GREEDY, True, ["TruePositive"])]
        doc = build_report(reports, [Category.GREEDY], AnalysisConfig(invocation_depth=2), snapshot_digest="0xabc")
        assert doc.tool == "tracehound"
        assert doc.version == __version__
        assert doc.config["invocation_depth"] == 2
        assert "category" not in doc.config
        assert "solver_path" not in doc.config
        assert doc.summary.categories[0].true_positives == 1


def one_candidate(mocker):
    def fake(program, start, subject, cfg):
        return ExplorationResult(candidates=[Candidate(category=cfg.category, subject=subject)], stats=ExplorationStats())

    mocker.patch("tracehound.services.analysis_service.explore_with_stats", side_effect=fake)


class TestReplayStart:
    """Candidates on a subject that is dead in the snapshot replay there, or on its earlier snapshot."""

    def dead_chain(self, f):
        return ChainState({f.address: AccountState(0)}, FIXTURE_BLOCK)

    def test_is_dead(self):
        f = get_fixture("mortal_thing")
        assert is_dead(self.dead_chain(f), f.address)
        assert not is_dead(f.snapshot(), f.address)
        assert not is_dead(ChainState({}, FIXTURE_BLOCK), f.address)
        assert is_dead(ChainState({}, FIXTURE_BLOCK), f.address, {f.address: f.snapshot()})

    def test_dead_subject_replays_on_the_snapshot(self, mocker):
        f = get_fixture("mortal_thing")
        one_candidate(mocker)
        run = mocker.patch.object(ValidationRunner, "run", autospec=True, return_value=[])
        dead = self.dead_chain(f)
        analyze_contract(f.snapshot(), f.address, [Category.SUICIDAL], AnalysisConfig(), validate=True, snapshot=dead)
        assert run.call_args.args[1] is dead

    def test_live_subject_replays_on_the_placed_state(self, mocker):
        f = get_fixture("mortal_thing")
        one_candidate(mocker)
        run = mocker.patch.object(ValidationRunner, "run", autospec=True, return_value=[])
        placed = f.snapshot()
        analyze_contract(
            placed,
            f.address,
            [Category.SUICIDAL],
            AnalysisConfig(),
            validate=True,
            snapshot=ChainState({}, FIXTURE_BLOCK),
        )
        assert run.call_args.args[1] is placed

    def test_alternates_reach_the_runner(self, mocker):
        f = get_fixture("mortal_thing")
        one_candidate(mocker)
        common = dict(validate=True, snapshot=self.dead_chain(f))

        without = analyze_contract(f.snapshot(), f.address, [Category.SUICIDAL], AnalysisConfig(), **common)
        (verdict,) = without.results[0].verdicts
        assert verdict["status"] == "NotValidatable"

        alternates = {f.address: f.snapshot()}
        with_alt = analyze_contract(
            f.snapshot(), f.address, [Category.SUICIDAL], AnalysisConfig(), alternates=alternates, **common
        )
        (verdict,) = with_alt.results[0].verdicts
        # the candidate carries no messages, so it reaches the validator and fails there
        assert verdict["status"] == "FalsePositive"
        assert verdict["reason"] == "no messages to replay"
