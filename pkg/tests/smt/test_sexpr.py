"""Tests for the solver output reader."""

import pytest

from tracehound.smt.sexpr import balance, bv_value, model_values, parse, tokenize

Z3_MODEL = """(
  (define-fun cd_4 () (_ BitVec 256)
    #x0000000000000000000000000000000000000000000000000000000000000004)
  (define-fun keccak_32 ((x!0 (_ BitVec 256))) (_ BitVec 256)
    #x0000000000000000000000000000000000000000000000000000000000000001)
  (define-fun caller_1 () (_ BitVec 256)
    (_ bv1234 256))
)"""


class TestTokenize:
    def test_strings_pipes_and_comments(self):
        text = '(echo "a ""quoted"" word") |odd name| ; trailing comment\nx'
        assert tokenize(text) == ["(", "echo", '"a ""quoted"" word"', ")", "odd name", "x"]

    def test_balance_ignores_parentheses_in_strings(self):
        assert balance('(error "unexpected )")') == 0
        assert balance("((a b)") == 1


class TestParse:
    def test_nested(self):
        assert parse("(a (b c)) d") == [["a", ["b", "c"]], "d"]

    @pytest.mark.parametrize("text", ["(a (b)", "a)"])
    def test_unbalanced(self, text):
        with pytest.raises(ValueError):
            parse(text)


class TestModelValues:
    def test_z3_model(self):
        assert model_values(Z3_MODEL) == {"cd_4": 4, "caller_1": 1234}

    def test_model_keyword_form(self):
        assert model_values("(model (define-fun y () (_ BitVec 256) #b101))") == {"y": 5}

    def test_bv_value_forms(self):
        assert bv_value("#xff") == 255
        assert bv_value(["_", "bv9", "256"]) == 9
        assert bv_value("true") is None
