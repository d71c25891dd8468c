"""Tests for corpus discovery, contract placement and corpus runs."""

import pytest

from tracehound.chainstate import AccountState, ChainState
from tracehound.chainstate.state import format_address
from tracehound.config import AnalysisConfig, Category
from tracehound.fixtures import FIXTURE_BLOCK, get_fixture
from tracehound.services import (
    analyze_file,
    corpus_address,
    discover_bytecode_files,
    place_contract,
    run_corpus,
)

STOP = b"\x00"


class TestDiscovery:
    def test_only_bytecode_suffixes_sorted(self, tmp_path):
        for name in ("b.hex", "a.BIN", "notes.txt", "c.hex"):
            (tmp_path / name).write_text("00")
        (tmp_path / "sub.hex").mkdir()
        assert [p.name for p in discover_bytecode_files(tmp_path)] == ["a.BIN", "b.hex", "c.hex"]

    def test_not_a_directory(self, tmp_path):
        path = tmp_path / "x.hex"
        path.write_text("00")
        with pytest.raises(NotADirectoryError):
            discover_bytecode_files(path)


class TestPlaceContract:
    """Where a corpus file lands in the starting state."""

    def test_named_account_keeps_balance_and_storage(self):
        start = ChainState({0xAB: AccountState(9, b"\x01", {0: 5})}, FIXTURE_BLOCK)
        state, address = place_contract(start, STOP, format_address(0xAB))
        assert address == 0xAB
        acct = state.get(0xAB)
        assert (acct.balance, acct.code, acct.storage) == (9, STOP, {0: 5})
        assert start.get(0xAB).code == b"\x01"

    def test_named_account_with_same_code(self):
        start = ChainState({0xAB: AccountState(9, STOP)}, FIXTURE_BLOCK)
        state, address = place_contract(start, STOP, format_address(0xAB))
        assert state is start and address == 0xAB

    def test_identical_code_is_reused(self):
        f = get_fixture("tap_nickname")
        start = f.snapshot()
        state, address = place_contract(start, f.bytecode, "tap")
        assert state is start and address == f.address

    def test_unknown_code_gets_a_derived_address(self):
        state, address = place_contract(ChainState({}, FIXTURE_BLOCK), STOP, "lonely")
        assert address == corpus_address("lonely")
        assert state.get(address).balance == 0
        assert state.is_contract(address)


class TestCorpusRun:
    def test_bad_files_are_reported(self, tmp_path):
        (tmp_path / "odd.hex").write_text("0x123")
        (tmp_path / "empty.bin").write_bytes(b"")
        r = analyze_file(tmp_path / "odd.hex", ChainState({}, FIXTURE_BLOCK), [Category.SUICIDAL], AnalysisConfig())
        assert r.error.startswith("load failed")
        assert r.source == "odd.hex"
        r = analyze_file(tmp_path / "empty.bin", ChainState({}, FIXTURE_BLOCK), [Category.SUICIDAL], AnalysisConfig())
        assert r.error == "load failed: empty bytecode"

    def test_reports_sorted_by_address(self, tmp_path):
        stop = get_fixture("stop_only")
        (tmp_path / "zz.hex").write_text("0x" + stop.bytecode.hex())
        (tmp_path / "aa.hex").write_text("60")
        (tmp_path / "text.hex").write_text("plain text is not hex")
        reports = run_corpus(tmp_path, stop.snapshot(), [Category.SUICIDAL], AnalysisConfig())
        assert len(reports) == 3
        keys = [(r.address or "", r.source or "") for r in reports]
        assert keys == sorted(keys)
        by_source = {r.source: r for r in reports}
        assert by_source["zz.hex"].address == format_address(stop.address)
        assert by_source["zz.hex"].results[0].exploration.skipped == "precondition"
        assert by_source["aa.hex"].address == format_address(corpus_address("aa"))
        assert by_source["text.hex"].error.startswith("load failed")
