"""Tests for SMT-LIB2 query text."""

import pytest

from tracehound.smt import SmtEncoder, encode
from tracehound.smt.encoder import LOGIC, bv_literal, uf_name
from tracehound.symbolic import VarOrigin, const, mk, mk_hash, var
from tracehound.symbolic.expr import Op


@pytest.fixture
def x():
    return var("cd_4", VarOrigin.CALLDATA)


class TestQueryText:
    """Shape of the script handed to the solver."""

    def test_script_frame(self, x):
        text = encode([mk("eq", x, const(5))])
        lines = text.splitlines()
        assert lines[0] == f"(set-logic {LOGIC})"
        assert LOGIC == "QF_AUFBV"
        assert "(declare-const cd_4 (_ BitVec 256))" in lines
        assert f"(assert (= cd_4 {bv_literal(5)}))" in lines
        assert lines[-1] == "(check-sat)"

    def test_variables_are_declared_once(self, x):
        q = SmtEncoder().encode([mk("gt", x, const(1)), mk("lt", x, const(9))])
        assert q.variables == ["cd_4"]
        assert sum(1 for d in q.declarations if d.startswith("(declare-const cd_4")) == 1

    def test_shared_subterm_becomes_one_macro(self, x):
        shared = mk("mul", x, x)
        q = SmtEncoder().encode([mk("gt", shared, const(1)), mk("lt", shared, const(100))])
        macros = [d for d in q.declarations if "bvmul" in d]
        assert len(macros) == 1
        assert macros[0].startswith("(define-fun e_")

    def test_division_is_guarded_against_zero(self, x):
        q = SmtEncoder().encode([mk("div", const(10), x)])
        (macro,) = [d for d in q.declarations if d.startswith("(define-fun")]
        assert "(ite (= cd_4 #x" in macro
        assert "bvudiv" in macro

    def test_nonzero_word_constraint(self, x):
        q = SmtEncoder().encode([mk("and", x, const(0xFF))])
        assert q.assertions[-1].startswith("(distinct ")

    def test_negated_comparison_stays_boolean(self, x):
        q = SmtEncoder().encode([mk("iszero", mk("lt", x, const(3)))])
        assert q.assertions == [f"(not (bvult cd_4 {bv_literal(3)}))"]

    def test_unknown_operation_rejected(self, x):
        with pytest.raises(ValueError):
            SmtEncoder().encode([Op("frobnicate", (x,))])


class TestHashes:
    """Keccak applications become uninterpreted functions."""

    def test_one_function_per_input_length(self, x):
        h1 = mk_hash([x, const(1)], 64)
        h2 = mk_hash([x, const(2)], 64)
        h3 = mk_hash([x], 32)
        q = SmtEncoder().encode([mk("eq", h1, h2), mk("eq", h3, const(0))])
        funs = [d for d in q.declarations if d.startswith("(declare-fun")]
        assert sorted(funs) == sorted(
            [
                f"(declare-fun {uf_name(64)} ((_ BitVec 256) (_ BitVec 256)) (_ BitVec 256))",
                f"(declare-fun {uf_name(32)} ((_ BitVec 256)) (_ BitVec 256))",
            ]
        )
        assert len(q.hashes) == 3

    def test_partial_last_word_is_masked(self, x):
        h = mk_hash([x], 20)
        q = SmtEncoder().encode([mk("eq", h, const(7))])
        tie = next(a for a in q.assertions if a.startswith(f"(= {h.name}"))
        mask = bv_literal(((1 << 160) - 1) << 96)
        assert f"(bvand cd_4 {mask})" in tie

    def test_concrete_hash_folds(self):
        assert mk_hash([const(0)], 32) == const(0x290DECD9548B62A8D60345A988386FC84BA6BC95484008F6362F93160EF3E563)
