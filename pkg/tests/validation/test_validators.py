"""Tests for concrete replay of candidates on sandbox forks."""

import pytest

from tracehound.chainstate import AccountState, ChainState, Message
from tracehound.chainstate.snapshot import state_digest
from tracehound.config import Category, ReplayMode, ValidationConfig
from tracehound.evm import HaltKind
from tracehound.fixtures import FIXTURE_BLOCK, get_fixture, selector
from tracehound.fixtures.contracts import ETHER, FOUR_WEEKS_S
from tracehound.symbolic import Candidate
from tracehound.validation import (
    ProdigalValidator,
    VerdictStatus,
    open_sandbox,
    replay_blocks,
    validate_greedy,
    validate_prodigal,
    validate_suicidal,
    validator_for,
)
from tracehound.words import word_to_bytes

ATTACKER = 0x00000000000000000000000000000000A77AC4E2


def call_data(signature, *args):
    return bytes.fromhex(selector(signature)[2:]) + b"".join(word_to_bytes(a) for a in args)


def candidate(category, name, *calls, **kw):
    f = get_fixture(name)
    msgs = [Message(ATTACKER, 0, call_data(sig, *args), f.address) for sig, *args in calls]
    return Candidate(category=category, subject=f.address, messages=msgs, attacker=ATTACKER, **kw)


MORTAL_CALLS = [("mortal()",), ("kill()",)]


class TestProdigalValidator:
    def test_mortal_pays_the_attacker(self):
        c = candidate(Category.PRODIGAL, "mortal_thing", *MORTAL_CALLS)
        verdict = validate_prodigal(get_fixture("mortal_thing").snapshot(), c)
        assert verdict.status is VerdictStatus.TRUE_POSITIVE
        assert verdict.attacker_balance_delta == ETHER // 5
        assert verdict.halts == [HaltKind.STOP.value, HaltKind.SUICIDE.value]
        assert verdict.conservation_ok
        assert verdict.notes == []

    def test_stranger_cannot_kill(self):
        c = candidate(Category.PRODIGAL, "mortal_thing", ("kill()",))
        c.attacker = 0xBEEF0000
        f = get_fixture("mortal_thing")
        start = ChainState({f.address: AccountState(ETHER, f.bytecode, {0: 0xD00D})}, FIXTURE_BLOCK)
        verdict = validate_prodigal(start, c)
        assert verdict.status is VerdictStatus.FALSE_POSITIVE
        assert verdict.attacker_balance_delta == 0
        assert verdict.reason == "attacker balance did not grow"

    def test_rng_guess_does_not_replay(self):
        c = candidate(Category.PRODIGAL, "rng_guess", ("Guess(uint256)", 12345))
        verdict = validate_prodigal(get_fixture("rng_guess").snapshot(), c)
        assert verdict.status is VerdictStatus.FALSE_POSITIVE

    def test_no_messages(self):
        c = candidate(Category.PRODIGAL, "tap_nickname")
        verdict = validate_prodigal(get_fixture("tap_nickname").snapshot(), c)
        assert verdict.status is VerdictStatus.FALSE_POSITIVE
        assert verdict.reason == "no messages to replay"

    def test_value_carrying_messages_are_funded(self):
        f = get_fixture("tap_nickname")
        c = Candidate(
            category=Category.PRODIGAL,
            subject=f.address,
            messages=[Message(ATTACKER, 5, call_data("tap(bytes20)", 1), f.address)],
            attacker=ATTACKER,
        )
        verdict = validate_prodigal(f.snapshot(), c)
        assert verdict.status is VerdictStatus.TRUE_POSITIVE
        assert verdict.attacker_balance_delta == ETHER // 10
        # check_leaky rejects value-carrying first messages
        assert verdict.notes

    def test_category_mismatch(self):
        c = candidate(Category.SUICIDAL, "mortal_thing", *MORTAL_CALLS)
        with pytest.raises(ValueError):
            ProdigalValidator().validate(get_fixture("mortal_thing").snapshot(), c)


class TestSuicidalValidator:
    def test_mortal_is_killed(self):
        c = candidate(Category.SUICIDAL, "mortal_thing", *MORTAL_CALLS)
        verdict = validate_suicidal(get_fixture("mortal_thing").snapshot(), c)
        assert verdict.status is VerdictStatus.TRUE_POSITIVE
        assert verdict.reason == "code cleared"
        assert verdict.code_cleared

    def test_parity_in_the_wrong_order(self):
        c = candidate(
            Category.SUICIDAL,
            "parity_wallet",
            ("kill(address)", ATTACKER),
            ("initMultiowned(address[],uint256)", 0x40, 0, 0),
        )
        verdict = validate_suicidal(get_fixture("parity_wallet").snapshot(), c)
        assert verdict.status is VerdictStatus.FALSE_POSITIVE
        assert verdict.reason == "subject still has code"

    def test_parity_in_order(self):
        c = candidate(
            Category.SUICIDAL,
            "parity_wallet",
            ("initMultiowned(address[],uint256)", 0x40, 0, 0),
            ("kill(address)", ATTACKER),
        )
        verdict = validate_suicidal(get_fixture("parity_wallet").snapshot(), c)
        assert verdict.status is VerdictStatus.TRUE_POSITIVE

    def test_dead_subject(self):
        c = candidate(Category.SUICIDAL, "mortal_thing", *MORTAL_CALLS)
        verdict = validate_suicidal(ChainState({}, FIXTURE_BLOCK), c)
        assert verdict.status is VerdictStatus.NOT_VALIDATABLE
        assert "no code" in verdict.reason


class TestReplayModes:
    """Block context used for replayed messages."""

    LATE = (FIXTURE_BLOCK.number + 1, FIXTURE_BLOCK.timestamp + FOUR_WEEKS_S)

    def dividend(self, schedule):
        return candidate(Category.SUICIDAL, "dividend", ("withdraw()",), block_schedule=schedule)

    def test_snapshot_mode_ignores_the_schedule(self):
        c = self.dividend([self.LATE])
        config = ValidationConfig(replay_mode=ReplayMode.SNAPSHOT)
        verdict = validate_suicidal(get_fixture("dividend").snapshot(), c, config)
        assert verdict.replay_mode == "snapshot"
        assert verdict.status is VerdictStatus.FALSE_POSITIVE
        assert verdict.halts == [HaltKind.RETURN.value]

    def test_auto_takes_a_future_schedule(self):
        c = self.dividend([self.LATE])
        verdict = validate_suicidal(get_fixture("dividend").snapshot(), c)
        assert verdict.replay_mode == "model"
        assert verdict.status is VerdictStatus.TRUE_POSITIVE

    def test_auto_falls_back_for_a_past_schedule(self):
        c = self.dividend([(FIXTURE_BLOCK.number - 5, FIXTURE_BLOCK.timestamp + FOUR_WEEKS_S)])
        blocks, mode = replay_blocks(get_fixture("dividend").snapshot(), c, ReplayMode.AUTO)
        assert blocks is None and mode == "snapshot"

    def test_model_mode_pins_every_block(self):
        c = self.dividend([self.LATE])
        blocks, mode = replay_blocks(get_fixture("dividend").snapshot(), c, ReplayMode.MODEL)
        assert mode == "model"
        (block,) = blocks
        assert (block.number, block.timestamp) == self.LATE
        assert block.coinbase == FIXTURE_BLOCK.coinbase

    def test_empty_schedule(self):
        c = self.dividend([])
        assert replay_blocks(get_fixture("dividend").snapshot(), c, ReplayMode.MODEL) == (None, "snapshot")


class TestGreedyValidator:
    def test_stop_keeps_what_it_gets(self):
        f = get_fixture("stop_only")
        c = Candidate(category=Category.GREEDY, subject=f.address, greedy_category="CategoryI")
        verdict = validate_greedy(f.snapshot(), c)
        assert verdict.status is VerdictStatus.TRUE_POSITIVE
        assert verdict.accepts_and_no_release
        assert verdict.halts == ["stop"]

    def test_funding_message_is_reused(self):
        f = get_fixture("simple_storage")
        funding = Message(ATTACKER, 3, call_data("set(uint256,address)", 1, 2), f.address)
        c = Candidate(category=Category.GREEDY, subject=f.address, funding_message=funding)
        verdict = validate_greedy(f.snapshot(), c)
        assert verdict.status is VerdictStatus.TRUE_POSITIVE

    def test_rejected_transfer(self):
        f = get_fixture("payable_guard")
        funding = Message(ATTACKER, 1, call_data("ping()"), f.address)
        c = Candidate(category=Category.GREEDY, subject=f.address, funding_message=funding)
        verdict = validate_greedy(f.snapshot(), c)
        assert verdict.status is VerdictStatus.FALSE_POSITIVE
        assert verdict.reason == "transfer not accepted (revert)"

    def test_release_instructions_need_manual_analysis(self):
        f = get_fixture("multisig_confirm")
        c = Candidate(category=Category.GREEDY, subject=f.address, greedy_category="CategoryII")
        verdict = validator_for(Category.GREEDY).validate(f.snapshot(), c)
        assert verdict.status is VerdictStatus.NOT_VALIDATABLE
        assert verdict.reason == "release instructions present; requires manual analysis"


class TestSandbox:
    def test_empty_subject_is_endowed(self):
        f = get_fixture("bounty")
        config = ValidationConfig(endowment_wei=7)
        sandbox = open_sandbox(f.snapshot(), f.address, config)
        assert sandbox.state.balance(f.address) == 7
        assert sandbox.minted == 7
        assert sandbox.state.balance(config.harness_address) == 0

    def test_funded_subject_is_left_alone(self):
        f = get_fixture("tap_nickname")
        sandbox = open_sandbox(f.snapshot(), f.address, ValidationConfig())
        assert sandbox.minted == 0
        assert sandbox.state.balance(f.address) == ETHER // 10

    def test_start_state_is_untouched(self):
        f = get_fixture("mortal_thing")
        start = f.snapshot()
        before = state_digest(start)
        validate_suicidal(start, candidate(Category.SUICIDAL, "mortal_thing", *MORTAL_CALLS))
        assert state_digest(start) == before
        assert start.is_contract(f.address)

    def test_verdict_dict(self):
        c = candidate(Category.SUICIDAL, "mortal_thing", *MORTAL_CALLS, path_digest="abc")
        d = validate_suicidal(get_fixture("mortal_thing").snapshot(), c).to_dict()
        assert d["status"] == "TruePositive"
        assert d["category"] == "suicidal"
        assert d["evidence"]["code_cleared"] is True
        assert d["path_digest"] == "abc"
