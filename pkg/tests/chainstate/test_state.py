"""Tests for the in-memory chain state."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tracehound.chainstate import (
    AccountState,
    BlockContext,
    ChainState,
    blockhash,
    fork,
    scan_posthumous,
    total_balance,
    with_account,
)
from tracehound.properties import posthumous


class TestScanPosthumous:
    """Codeless accounts with a positive balance."""

    def test_three_of_ten(self):
        accounts = {
            0x01: AccountState(10, bytes.fromhex("00")),
            0x02: AccountState(0),
            0x03: AccountState(7),  # posthumous
            0x04: AccountState(0, bytes.fromhex("6000")),
            0x05: AccountState(1, b""),  # posthumous: empty code reads as none
            0x06: AccountState(3, bytes.fromhex("ff")),
            0x07: AccountState(0, None, {1: 1}),
            0x08: AccountState(10**18),  # posthumous
            0x09: AccountState(0, b""),
            0x0A: AccountState(2, bytes.fromhex("5b")),
        }
        s = ChainState(accounts)
        assert scan_posthumous(s) == [0x03, 0x05, 0x08]
        assert posthumous(s) == [0x03, 0x05, 0x08]

    def test_empty_state(self):
        assert scan_posthumous(ChainState()) == []


class TestTransfers:
    """Balance movement and harness funding."""

    def test_transfer_conserves_total(self):
        s = ChainState({1: AccountState(10), 2: AccountState(5)})
        s.transfer(1, 2, 4)
        assert (s.balance(1), s.balance(2)) == (6, 9)
        assert total_balance(s) == 15

    def test_insufficient_balance(self):
        s = ChainState({1: AccountState(1)})
        with pytest.raises(ValueError):
            s.transfer(1, 2, 2)

    def test_mint_is_the_only_source(self):
        s = ChainState()
        s.mint(3, 100)
        assert total_balance(s) == 100

    def test_zero_store_removes_slot(self):
        acct = AccountState(storage={1: 5})
        acct.store(1, 0)
        assert acct.storage == {}


class TestIsolation:
    """Forks never share mutable state with their source."""

    @given(
        st.dictionaries(
            st.integers(min_value=1, max_value=50),
            st.tuples(st.integers(min_value=0, max_value=10**20), st.dictionaries(st.integers(0, 9), st.integers(1, 9))),
            max_size=6,
        )
    )
    def test_fork_mutation_does_not_leak(self, spec):
        s = ChainState({a: AccountState(b, b"\x00", dict(store)) for a, (b, store) in spec.items()})
        snapshot = {a: (acct.balance, dict(acct.storage)) for a, acct in s.accounts.items()}
        f = fork(s)
        for acct in f.accounts.values():
            acct.balance += 1
            acct.store(99, 1)
        f.mint(0xDEAD, 5)
        assert {a: (acct.balance, dict(acct.storage)) for a, acct in s.accounts.items()} == snapshot
        assert 0xDEAD not in s.accounts

    def test_with_account_copies(self):
        s = ChainState()
        acct = AccountState(1, b"\x00", {1: 1})
        t = with_account(s, 0xAB, acct)
        acct.store(2, 2)
        assert t.account(0xAB).storage == {1: 1}
        assert s.get(0xAB) is None


class TestBlockhash:
    """Deterministic BLOCKHASH over the lookback window."""

    def test_window(self):
        block = BlockContext(number=1000, timestamp=1, blockhash_seed=7)
        assert blockhash(block, 1000) == 0
        assert blockhash(block, 1000 - 257) == 0
        assert blockhash(block, 999) != 0
        assert blockhash(block, 744) != 0

    def test_seed_changes_hash(self):
        a = BlockContext(number=10, blockhash_seed=1)
        b = BlockContext(number=10, blockhash_seed=2)
        assert blockhash(a, 5) != blockhash(b, 5)
