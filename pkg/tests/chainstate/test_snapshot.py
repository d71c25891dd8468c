"""Tests for snapshot loading, saving and digests."""

import json

import pytest

from tracehound.chainstate import (
    AccountState,
    BlockContext,
    ChainState,
    dump_snapshot,
    load_snapshot,
    parse_snapshot,
    save_snapshot,
    state_digest,
)
from tracehound.errors import DuplicateAddress, MalformedSnapshot

A = "0x00000000000000000000000000000000000000aa"
B = "0x00000000000000000000000000000000000000bb"


def _doc(**accounts):
    return {
        "block": {"number": 100, "timestamp": 1_500_000_000, "coinbase": "0x" + "00" * 20, "blockhashSeed": "0x1"},
        "accounts": accounts,
    }


class TestParseSnapshot:
    """Schema validation and conversion to ChainState."""

    def test_parses_accounts_and_block(self):
        s = parse_snapshot(_doc(**{A: {"balance": "0x10", "code": "0x6000", "storage": {"0x0": "0x2a"}}}))
        assert s.block.number == 100
        assert s.balance(0xAA) == 16
        assert s.code(0xAA) == bytes.fromhex("6000")
        assert s.account(0xAA).load(0) == 42

    def test_accepts_json_text(self):
        s = parse_snapshot(json.dumps(_doc(**{A: {"balance": "0x1"}})))
        assert s.balance(0xAA) == 1
        assert not s.is_contract(0xAA)

    def test_duplicate_address_text(self):
        text = (
            '{"block": {"number": 1, "timestamp": 1, "coinbase": "0x' + "00" * 20 + '", "blockhashSeed": "0x0"},'
            ' "accounts": {"' + A + '": {"balance": "0x1"}, "' + A + '": {"balance": "0x2"}}}'
        )
        with pytest.raises(DuplicateAddress):
            parse_snapshot(text)

    def test_duplicate_address_case_variants(self):
        upper = "0x00000000000000000000000000000000000000AA"
        with pytest.raises(DuplicateAddress):
            parse_snapshot(_doc(**{A: {"balance": "0x1"}, upper: {"balance": "0x2"}}))

    def test_unknown_field_rejected(self):
        with pytest.raises(MalformedSnapshot):
            parse_snapshot(_doc(**{A: {"balance": "0x1", "nonce": "0x0"}}))

    def test_bad_address_rejected(self):
        with pytest.raises(MalformedSnapshot):
            parse_snapshot(_doc(**{"0x1234": {"balance": "0x1"}}))

    def test_oversized_balance_rejected(self):
        with pytest.raises(MalformedSnapshot):
            parse_snapshot(_doc(**{A: {"balance": "0x1" + "0" * 64}}))

    @pytest.mark.parametrize(
        "storage",
        [
            {"0x0": "0x1", "0x00": "0x2"},
            {"0x1": "0x1", "0x0000000000000000000000000000000000000000000000000000000000000001": "0x2"},
        ],
    )
    def test_storage_keys_naming_one_slot(self, storage):
        with pytest.raises(MalformedSnapshot, match="name the same slot"):
            parse_snapshot(_doc(**{A: {"balance": "0x1", "storage": storage}}))

    @pytest.mark.parametrize(
        "storage",
        [{"0xA": "0x1"}, {"0x1": "0xFF"}, {"0X1": "0x1"}, {"0x" + "1" * 65: "0x1"}],
    )
    def test_storage_words_are_lowercase_hex(self, storage):
        with pytest.raises(MalformedSnapshot, match="lowercase 32-byte hex word"):
            parse_snapshot(_doc(**{A: {"balance": "0x1", "storage": storage}}))

    def test_storage_with_leading_zeros(self):
        s = parse_snapshot(_doc(**{A: {"balance": "0x1", "storage": {"0x00": "0x0a"}}}))
        assert s.account(0xAA).load(0) == 10

    def test_invalid_json(self):
        with pytest.raises(MalformedSnapshot):
            parse_snapshot("{not json")

    def test_missing_file(self, tmp_path):
        with pytest.raises(MalformedSnapshot):
            load_snapshot(tmp_path / "absent.json")


class TestCanonicalForm:
    """Serialization and digests."""

    def _state(self):
        return ChainState(
            {
                0xBB: AccountState(5, bytes.fromhex("6001"), {1: 2}),
                0xAA: AccountState(7),
            },
            BlockContext(10, 20, 0, 3),
        )

    def test_save_then_load(self, tmp_path):
        s = self._state()
        loaded = load_snapshot(save_snapshot(s, tmp_path / "s.json"))
        assert loaded == s

    def test_dump_is_sorted_and_minimal(self):
        doc = json.loads(dump_snapshot(self._state()))
        assert list(doc["accounts"]) == [A, B]
        assert doc["accounts"][B] == {"balance": "0x5", "code": "0x6001", "storage": {"0x1": "0x2"}}

    def test_digest_ignores_insertion_order(self):
        s = self._state()
        reordered = ChainState(dict(reversed(list(s.accounts.items()))), s.block)
        assert state_digest(s) == state_digest(reordered)

    def test_digest_tracks_changes(self):
        s = self._state()
        before = state_digest(s)
        s.mint(0xAA, 1)
        assert state_digest(s) != before
