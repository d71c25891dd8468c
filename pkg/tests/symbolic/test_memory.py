"""Tests for byte-addressed symbolic memory."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tracehound.symbolic import SymMemory, VarOrigin, const, evaluate, var
from tracehound.words import word_to_bytes

X = var("cd_4", VarOrigin.CALLDATA)


class TestSymMemory:
    def test_whole_word_roundtrip_keeps_the_expression(self):
        mem = SymMemory()
        mem.store_word(64, X)
        assert mem.load_word(64) == X

    def test_unwritten_memory_reads_zero(self):
        assert SymMemory().load_word(1000) == const(0)

    def test_concrete_bytes(self):
        mem = SymMemory()
        mem.store_word(0, const(0xABCD))
        assert mem.concrete_bytes(30, 2) == b"\xab\xcd"
        mem.store_word(32, X)
        with pytest.raises(ValueError):
            mem.concrete_bytes(30, 4)

    def test_copy_is_independent(self):
        mem = SymMemory()
        mem.store_word(0, const(1))
        other = mem.copy()
        other.store_word(0, const(2))
        assert mem.load_word(0) == const(1)

    @given(x=st.integers(0, 2**256 - 1), c=st.integers(0, 2**256 - 1), shift=st.integers(1, 31))
    def test_misaligned_read_matches_concrete_bytes(self, x, c, shift):
        mem = SymMemory()
        mem.store_word(0, X)
        mem.store_word(32, const(c))
        expected = int.from_bytes((word_to_bytes(x) + word_to_bytes(c))[shift: shift + 32], "big")
        assert evaluate(mem.load_word(shift), {"cd_4": x}) == expected

    @given(x=st.integers(0, 2**256 - 1), b=st.integers(0, 255), at=st.integers(0, 31))
    def test_byte_store_inside_a_symbolic_word(self, x, b, at):
        mem = SymMemory()
        mem.store_word(0, X)
        mem.store_byte(at, const(b))
        raw = bytearray(word_to_bytes(x))
        raw[at] = b
        assert evaluate(mem.load_word(0), {"cd_4": x}) == int.from_bytes(raw, "big")

    def test_load_words_pads_the_tail(self):
        mem = SymMemory()
        mem.store_word(0, const(2**256 - 1))
        (word,) = mem.load_words(0, 20)
        assert word == const(((1 << 160) - 1) << 96)
