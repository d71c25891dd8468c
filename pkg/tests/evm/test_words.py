"""Tests for 256-bit word arithmetic."""

import pytest

from tracehound import words
from tracehound.words import UINT256_MASK, to_unsigned

MINUS_ONE = UINT256_MASK


def neg(x):
    return to_unsigned(-x)


class TestSignedArithmetic:
    @pytest.mark.parametrize(
        "a,b,expected",
        [
            (neg(4), 2, neg(2)),
            (7, neg(2), neg(3)),
            (neg(7), neg(2), 3),
            (5, 0, 0),
        ],
    )
    def test_sdiv(self, a, b, expected):
        assert words.sdiv(a, b) == expected

    def test_smod_takes_sign_of_dividend(self):
        assert words.smod(neg(7), 3) == neg(1)
        assert words.smod(7, neg(3)) == 1

    def test_signed_comparisons(self):
        assert words.slt(MINUS_ONE, 0) == 1
        assert words.lt(MINUS_ONE, 0) == 0
        assert words.sgt(1, MINUS_ONE) == 1


class TestWrapping:
    def test_add_and_sub_wrap(self):
        assert words.add(UINT256_MASK, 1) == 0
        assert words.sub(0, 1) == UINT256_MASK

    def test_exp_is_modular(self):
        assert words.exp(2, 256) == 0
        assert words.exp(2, 255) == 1 << 255

    def test_division_by_zero_is_zero(self):
        assert words.div(1, 0) == 0
        assert words.mod(1, 0) == 0
        assert words.addmod(1, 2, 0) == 0
        assert words.mulmod(1, 2, 0) == 0

    def test_addmod_uses_unbounded_sum(self):
        assert words.addmod(UINT256_MASK, 2, 3) == (UINT256_MASK + 2) % 3


class TestBits:
    def test_signextend(self):
        assert words.signextend(0, 0xFF) == MINUS_ONE
        assert words.signextend(0, 0x7F) == 0x7F
        assert words.signextend(1, 0x12_80_00) == neg(0x8000)
        assert words.signextend(31, 0xFF) == 0xFF

    def test_byte_counts_from_the_most_significant_end(self):
        assert words.byte(31, 0x1234) == 0x34
        assert words.byte(30, 0x1234) == 0x12
        assert words.byte(32, 0x1234) == 0

    def test_shifts(self):
        assert words.shl(256, 1) == 0
        assert words.shl(255, 3) == 1 << 255
        assert words.shr(4, 0xF0) == 0x0F
        assert words.sar(4, neg(16)) == MINUS_ONE
        assert words.sar(300, neg(1)) == MINUS_ONE
        assert words.sar(300, 1) == 0

    def test_word_bytes_pad_on_the_right(self):
        assert words.bytes_to_word(b"\x01") == 1 << 248
        assert words.word_to_bytes(1)[-1] == 1
