"""Tests for the tracehound command line."""

import json

import pytest

from cli.cli import build_parser, main
from tracehound.chainstate import AccountState, ChainState, save_snapshot
from tracehound.fixtures import FIXTURE_BLOCK, FIXTURES, get_fixture


def write_stop(tmp_path):
    path = tmp_path / "stop_only.hex"
    path.write_text("0x" + get_fixture("stop_only").bytecode.hex())
    return path


class TestArguments:
    """Parse errors exit with status 2."""

    def test_no_command(self, isolated_home, capsys):
        assert main([]) == 2
        assert "usage" in capsys.readouterr().out

    def test_missing_source(self, isolated_home, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["analyze"])
        assert exc.value.code == 2
        assert "error:" in capsys.readouterr().err

    @pytest.mark.parametrize("flag", ["--depth", "--max-cfg-nodes", "--array-bound"])
    def test_depth_must_be_positive(self, isolated_home, tmp_path, flag):
        with pytest.raises(SystemExit) as exc:
            main(["analyze", "--bytecode", str(write_stop(tmp_path)), flag, "0"])
        assert exc.value.code == 2

    def test_address_needs_snapshot(self, isolated_home, capsys):
        assert main(["analyze", "--address", "0x" + "11" * 20]) == 2
        assert "--address needs --snapshot" in capsys.readouterr().err

    def test_defaults(self):
        args = build_parser().parse_args(["corpus", "contracts"])
        assert args.category == "all"
        assert args.replay_mode == "auto"
        assert args.depth is None


class TestAnalyze:
    def test_report_written(self, isolated_home, tmp_path, capsys):
        out = tmp_path / "report.json"
        rc = main(["analyze", "--bytecode", str(write_stop(tmp_path)), "--category", "suicidal", "--out", str(out)])
        assert rc == 0
        doc = json.loads(out.read_text())
        (contract,) = doc["contracts"]
        assert contract["source"] == "stop_only.hex"
        assert contract["results"][0]["exploration"]["skipped"] == "precondition"
        assert doc["summary"]["categories"][0]["category"] == "suicidal"
        stdout = capsys.readouterr().out
        assert "suicidal: clean (skipped: precondition)" in stdout
        assert "report written to" in stdout

    def test_default_report_location(self, isolated_home, tmp_path):
        assert main(["analyze", "--bytecode", str(write_stop(tmp_path)), "--category", "suicidal"]) == 0
        assert (isolated_home / "reports" / "stop_only.json").is_file()

    def test_address_without_code(self, isolated_home, tmp_path, capsys):
        snapshot = save_snapshot(ChainState({}, FIXTURE_BLOCK), tmp_path / "empty.json")
        rc = main(["analyze", "--address", "0x" + "11" * 20, "--snapshot", str(snapshot)])
        assert rc == 2
        assert "has no code" in capsys.readouterr().err

    def test_unreadable_bytecode(self, isolated_home, tmp_path, capsys):
        assert main(["analyze", "--bytecode", str(tmp_path / "missing.hex")]) == 2
        assert capsys.readouterr().err.startswith("error:")

    def test_bytecode_format(self, isolated_home, tmp_path, capsys):
        path = tmp_path / "stop_only.txt"
        path.write_bytes(get_fixture("stop_only").bytecode)
        args = ["analyze", "--bytecode", str(path), "--category", "suicidal", "--out", str(tmp_path / "r.json")]
        assert main(args) == 2
        assert capsys.readouterr().err.startswith("error:")
        assert main(args + ["--bytecode-format", "bin"]) == 0

    @pytest.mark.solver
    def test_fail_on_findings(self, isolated_home, tmp_path):
        args = ["analyze", "--bytecode", str(write_stop(tmp_path)), "--category", "greedy", "--depth", "1"]
        assert main(args + ["--validate"]) == 0
        assert main(args + ["--validate", "--fail-on-findings"]) == 1


class TestAlternateSnapshot:
    """A subject that suicided before the snapshot replays on an earlier one."""

    def dead_subject(self, tmp_path):
        f = get_fixture("mortal_thing")
        code = tmp_path / f"0x{f.address:040x}.hex"
        code.write_text("0x" + f.bytecode.hex())
        current = save_snapshot(ChainState({f.address: AccountState(0)}, FIXTURE_BLOCK), tmp_path / "current.json")
        earlier = save_snapshot(f.snapshot(), tmp_path / "earlier.json")
        args = ["analyze", "--bytecode", str(code), "--snapshot", str(current), "--category", "suicidal"]
        return f, args, earlier

    def verdicts(self, out):
        (contract,) = json.loads(out.read_text())["contracts"]
        return [v["status"] for v in contract["results"][0]["verdicts"]]

    @pytest.mark.solver
    def test_replayed_on_earlier_snapshot(self, isolated_home, tmp_path):
        f, args, earlier = self.dead_subject(tmp_path)
        out = tmp_path / "report.json"
        args += ["--depth", "2", "--validate", "--out", str(out)]

        assert main(args) == 0
        assert set(self.verdicts(out)) == {"NotValidatable"}

        assert main(args + ["--alternate-snapshot", f"0x{f.address:040x}={earlier}"]) == 0
        assert "TruePositive" in self.verdicts(out)

    @pytest.mark.parametrize("entry", ["no-equals-sign", "0x12=", "nothex=snap.json"])
    def test_malformed_entry(self, isolated_home, tmp_path, capsys, entry):
        _, args, _ = self.dead_subject(tmp_path)
        assert main(args + ["--validate", "--alternate-snapshot", entry]) == 2
        assert "--alternate-snapshot" in capsys.readouterr().err

    def test_needs_validate(self, isolated_home, tmp_path, capsys):
        f, args, earlier = self.dead_subject(tmp_path)
        assert main(args + ["--alternate-snapshot", f"0x{f.address:040x}={earlier}"]) == 2
        assert "needs --validate" in capsys.readouterr().err

    def test_missing_alternate_file(self, isolated_home, tmp_path, capsys):
        f, args, _ = self.dead_subject(tmp_path)
        missing = tmp_path / "missing.json"
        assert main(args + ["--validate", "--alternate-snapshot", f"0x{f.address:040x}={missing}"]) == 2
        assert capsys.readouterr().err.startswith("error:")

    def test_corpus_accepts_the_flag(self):
        args = build_parser().parse_args(
            ["corpus", "contracts", "--alternate-snapshot", "0x01=a.json", "--alternate-snapshot", "0x02=b.json"]
        )
        assert args.alternate_snapshot == ["0x01=a.json", "0x02=b.json"]


class TestCorpus:
    def test_not_a_directory(self, isolated_home, tmp_path, capsys):
        assert main(["corpus", str(write_stop(tmp_path))]) == 2
        assert "not a directory" in capsys.readouterr().err

    def test_directory(self, isolated_home, tmp_path, capsys):
        corpus = tmp_path / "contracts"
        corpus.mkdir()
        write_stop(corpus)
        (corpus / "odd.hex").write_text("0x123")
        out = tmp_path / "corpus.json"
        rc = main(["corpus", str(corpus), "--category", "suicidal", "--workers", "1", "--out", str(out)])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert doc["summary"]["contracts"] == 2
        assert doc["summary"]["errors"] == 1
        assert "odd.hex: error: load failed" in capsys.readouterr().out


class TestOtherCommands:
    def test_scan_posthumous(self, isolated_home, tmp_path, capsys):
        state = ChainState(
            {0xAA: AccountState(5), 0xBB: AccountState(5, b"\x00"), 0xCC: AccountState(0)},
            FIXTURE_BLOCK,
        )
        snapshot = save_snapshot(state, tmp_path / "chain.json")
        out = tmp_path / "dead.json"
        assert main(["scan-posthumous", "--snapshot", str(snapshot), "--out", str(out)]) == 0
        assert json.loads(out.read_text()) == {"addresses": ["0x" + "00" * 19 + "aa"]}
        assert "1 of 3 account(s)" in capsys.readouterr().out

    def test_fixtures_list(self, isolated_home, capsys):
        assert main(["fixtures"]) == 0
        stdout = capsys.readouterr().out
        for name in FIXTURES:
            assert name in stdout

    def test_fixtures_export(self, isolated_home, tmp_path):
        target = tmp_path / "corpus"
        assert main(["fixtures", "--export", str(target)]) == 0
        assert (target / "snapshot.json").is_file()
        assert (target / "bounty.hex").is_file()
        assert (target / "mortal_thing.expected.json").is_file()

    def test_serve(self, isolated_home, mocker):
        run = mocker.patch("uvicorn.run")
        assert main(["serve", "--port", "9123"]) == 0
        run.assert_called_once_with("tracehound.server:app", host="127.0.0.1", port=9123, reload=False)
