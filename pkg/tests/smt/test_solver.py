"""Tests for the solver session, its cache and the encoder/evaluator agreement."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tracehound.errors import SolverUnavailable
from tracehound.smt import CachingSolver, Sat, SolverSession, Unknown, Unsat
from tracehound.symbolic import ONE, ZERO, VarOrigin, const, evaluate, mk, var
from tracehound.symbolic.expr import conj

X = var("cd_4", VarOrigin.CALLDATA)
WORD = st.integers(0, 2**256 - 1)


def fake_solver(mocker, lines):
    """Patch Popen with a process whose stdout replays `lines`."""
    proc = mocker.Mock()
    proc.stdout = iter(lines)
    proc.poll.return_value = None
    proc.pid = 4242
    mocker.patch("tracehound.smt.solver.subprocess.Popen", return_value=proc)
    return proc


def sent(proc):
    return [c.args[0].rstrip("\n") for c in proc.stdin.write.call_args_list]


class TestTrivialConstraints:
    """Constant constraints never reach a process."""

    def test_true_constants_are_sat(self):
        session = SolverSession("/nonexistent/solver")
        assert session.check([ONE, const(7)]) == Sat({})
        assert session.queries == 0

    def test_false_constant_is_unsat(self):
        session = SolverSession("/nonexistent/solver")
        assert session.check([X, ZERO]) == Unsat()

    def test_missing_binary(self):
        session = SolverSession("/nonexistent/solver")
        with pytest.raises(SolverUnavailable):
            session.check([mk("eq", X, const(1))])

    def test_timeout_must_be_positive(self):
        with pytest.raises(ValueError):
            SolverSession("/nonexistent/solver").check([X], timeout_s=-1)


class TestSessionProtocol:
    """Conversation with a scripted solver process."""

    def test_sat_with_model(self, mocker):
        proc = fake_solver(
            mocker,
            ["sat", "(", "  (define-fun cd_4 () (_ BitVec 256) #x" + "0" * 63 + "4)", ")"],
        )
        with SolverSession("z3") as session:
            result = session.check([mk("eq", mk("add", X, const(1)), const(5))], timeout_s=3)
        assert result == Sat({"cd_4": 4})
        commands = sent(proc)
        assert "(set-option :timeout 3000)" in commands
        assert commands.index("(push 1)") < commands.index("(check-sat)") < commands.index("(get-model)")
        assert "(pop 1)" in commands

    def test_missing_model_entries_default_to_zero(self, mocker):
        fake_solver(mocker, ["sat", "()"])
        with SolverSession("z3") as session:
            result = session.check([mk("eq", mk("and", X, const(1)), const(0))])
        assert result == Sat({"cd_4": 0})

    def test_unknown_with_timeout_reason(self, mocker):
        fake_solver(mocker, ["unknown", '(:reason-unknown "timeout")'])
        with SolverSession("z3") as session:
            assert session.check([mk("gt", X, const(1))]) == Unknown("timeout")

    def test_rejected_query_is_unknown(self, mocker):
        fake_solver(mocker, ['(error "line 4 column 10: unknown constant")', "unsat"])
        with SolverSession("z3") as session:
            assert session.check([mk("gt", X, const(1))]) == Unknown("solver-error")

    def test_process_exit_is_reported(self, mocker):
        fake_solver(mocker, [])
        with SolverSession("z3") as session:
            with pytest.raises(SolverUnavailable):
                session.check([mk("gt", X, const(1))])


class TestCachingSolver:
    """Answers are reused per constraint set."""

    def test_repeated_query_hits_cache(self, mocker):
        session = mocker.Mock()
        session.check.return_value = Unsat()
        solver = CachingSolver(session, timeout_s=5)
        constraints = [mk("gt", X, const(1)), mk("lt", X, const(1))]
        assert solver.is_sat(constraints) == (False, True)
        assert solver.is_sat(list(reversed(constraints))) == (False, True)
        assert solver.calls == 1
        session.check.assert_called_once()

    def test_model_request_upgrades_a_cached_sat(self, mocker):
        session = mocker.Mock()
        session.check.side_effect = [Sat({}), Sat({"cd_4": 2})]
        solver = CachingSolver(session, timeout_s=5)
        constraints = [mk("gt", X, const(1))]
        solver.check(constraints)
        assert solver.check(constraints, want_model=True) == Sat({"cd_4": 2})
        assert solver.check(constraints) == Sat({"cd_4": 2})
        assert solver.calls == 2

    def test_unknown_is_undecided(self, mocker):
        session = mocker.Mock()
        session.check.return_value = Unknown("timeout")
        solver = CachingSolver(session, timeout_s=5)
        assert solver.is_sat([mk("gt", X, const(1))]) == (False, False)
        assert solver.unknowns == 1


@pytest.fixture(scope="module")
def session():
    with SolverSession(timeout_s=20) as s:
        yield s


@pytest.mark.solver
class TestRealSolver:
    """End-to-end against the installed solver."""

    def test_linear_equation(self, session):
        result = session.check([mk("eq", mk("add", X, const(1)), const(5))])
        assert isinstance(result, Sat)
        assert result.model["cd_4"] == 4

    def test_contradiction(self, session):
        assert session.check([mk("gt", X, const(5)), mk("lt", X, const(3))]) == Unsat()

    def test_conjunction_of_truth_values(self, session):
        y = var("cd_24", VarOrigin.CALLDATA)
        result = session.check([conj(mk("eq", X, const(3)), y)])
        assert isinstance(result, Sat)
        assert result.model["cd_4"] == 3
        assert result.model["cd_24"] != 0

    @pytest.mark.parametrize(
        "op",
        ["add", "sub", "and", "or", "xor", "shl", "shr", "sar", "byte", "lt", "gt", "slt", "sgt", "eq"],
    )
    @given(c=WORD, x0=WORD)
    @settings(max_examples=10, deadline=None)
    def test_encoding_agrees_with_evaluation(self, session, op, c, x0):
        """Whatever model the solver finds, evaluating the term under it hits the target."""
        term = mk(op, X, const(c))
        target = evaluate(term, {"cd_4": x0})
        result = session.check([mk("eq", term, const(target))])
        assert isinstance(result, Sat)
        assert evaluate(term, result.model) == target

    @given(width=st.integers(0, 30), x0=WORD)
    @settings(max_examples=10, deadline=None)
    def test_signextend_agrees_with_evaluation(self, session, width, x0):
        term = mk("signextend", const(width), X)
        target = evaluate(term, {"cd_4": x0})
        result = session.check([mk("eq", term, const(target))])
        assert isinstance(result, Sat)
        assert evaluate(term, result.model) == target

    @pytest.mark.parametrize(
        "op,c,target",
        [("div", 7, 3), ("mod", 7, 5), ("sdiv", 2, 2**256 - 3), ("smod", 5, 2**256 - 1), ("mul", 3, 12)],
    )
    def test_arithmetic_with_small_operands(self, session, op, c, target):
        term = mk(op, X, const(c))
        result = session.check([mk("eq", term, const(target))])
        assert isinstance(result, Sat)
        assert evaluate(term, result.model) == target
