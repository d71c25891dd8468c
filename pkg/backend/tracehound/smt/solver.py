"""
External solver process driven over SMT-LIB2 text.

One `SolverSession` owns one child process. Each query runs inside a
push/pop scope so declarations never leak between queries. A reader thread
feeds stdout lines into a queue, which lets the session enforce a
wall-clock guard on top of the solver's own timeout.
"""

import logging
import queue
import subprocess
import threading
import time
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from tracehound.config.solver import resolve_solver_path
from tracehound.errors import SolverUnavailable
from tracehound.smt.encoder import SmtEncoder
from tracehound.smt.sexpr import balance, model_values
from tracehound.symbolic.expr import Const, SymValue

logger = logging.getLogger(__name__)

# Seconds allowed beyond the solver's own timeout before the process is killed.
WALL_CLOCK_SLACK_S = 2.0


@dataclass(frozen=True)
class Sat:
    model: Dict[str, int] = field(default_factory=dict)

    status = "sat"


@dataclass(frozen=True)
class Unsat:
    status = "unsat"


@dataclass(frozen=True)
class Unknown:
    reason: str = "timeout"

    status = "unknown"


SolverResult = Union[Sat, Unsat, Unknown]


class SolverSession:
    """A reusable solver child process."""

    def __init__(self, path: Optional[str] = None, timeout_s: float = 10.0):
        self.path = resolve_solver_path(path)
        self.timeout_s = timeout_s
        self.encoder = SmtEncoder()
        self.queries = 0
        self._proc: Optional[subprocess.Popen] = None
        self._lines: "queue.Queue[Optional[str]]" = queue.Queue()
        self._timeout_sent: Optional[float] = None

    # -- process lifecycle ---------------------------------------------------

    def start(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            return
        if not self.path:
            raise SolverUnavailable("no SMT solver found; install z3-solver or set TRACEHOUND_SOLVER_PATH")
        try:
            self._proc = subprocess.Popen(
                [self.path, "-in", "-smt2"],
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.STDOUT,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            self._proc = None
            raise SolverUnavailable(f"cannot start solver {self.path}: {exc}") from exc
        self._lines = queue.Queue()
        self._timeout_sent = None
        reader = threading.Thread(target=self._pump, args=(self._proc, self._lines), daemon=True)
        reader.start()
        logger.info("started solver process %s (pid %s)", self.path, self._proc.pid)
        self._send("(set-option :print-success false)")
        self._send("(set-option :produce-models true)")

    @staticmethod
    def _pump(proc: subprocess.Popen, lines: "queue.Queue[Optional[str]]") -> None:
        assert proc.stdout is not None
        for line in proc.stdout:
            lines.put(line.rstrip("\n"))
        lines.put(None)

    def close(self) -> None:
        proc, self._proc = self._proc, None
        if proc is None:
            return
        try:
            if proc.poll() is None and proc.stdin is not None:
                proc.stdin.write("(exit)\n")
                proc.stdin.flush()
                proc.wait(timeout=1)
        except (OSError, subprocess.TimeoutExpired):
            pass
        if proc.poll() is None:
            proc.kill()
            proc.wait()

    def _restart(self, why: str) -> None:
        logger.info("restarting solver process: %s", why)
        self.close()

    def __enter__(self) -> "SolverSession":
        self.start()
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- protocol ----------------------------------------------------------

    def _send(self, text: str) -> None:
        assert self._proc is not None and self._proc.stdin is not None
        try:
            self._proc.stdin.write(text + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            self._proc = None
            raise SolverUnavailable(f"solver process died: {exc}") from exc

    def _readline(self, deadline: float) -> Optional[str]:
        """Next output line, or None on wall-clock expiry; raises if the process exited."""
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            return None
        try:
            line = self._lines.get(timeout=remaining)
        except queue.Empty:
            return None
        if line is None:
            self._proc = None
            raise SolverUnavailable("solver process exited unexpectedly")
        return line

    def _read_sexpr(self, deadline: float) -> Optional[str]:
        buf: List[str] = []
        depth = 0
        while True:
            line = self._readline(deadline)
            if line is None:
                return None
            if not line.strip() and not buf:
                continue
            buf.append(line)
            depth += balance(line)
            if depth <= 0:
                return "\n".join(buf)

    def _set_timeout(self, timeout_s: float) -> None:
        if self._timeout_sent != timeout_s:
            self._send(f"(set-option :timeout {int(timeout_s * 1000)})")
            self._timeout_sent = timeout_s

    def check(
        self,
        constraints: Sequence[SymValue],
        timeout_s: Optional[float] = None,
        want_model: bool = True,
    ) -> SolverResult:
        """Decide the conjunction of constraints (each a word that must be nonzero)."""
        timeout_s = timeout_s or self.timeout_s
        if timeout_s <= 0:
            raise ValueError("timeout_s must be positive")
        live = [c for c in constraints if not (isinstance(c, Const) and c.value)]
        if any(isinstance(c, Const) for c in live):
            return Unsat()
        if not live:
            return Sat({})

        self.start()
        self.queries += 1
        query = self.encoder.encode(live)
        self._set_timeout(timeout_s)
        deadline = time.monotonic() + timeout_s + WALL_CLOCK_SLACK_S
        self._send("(push 1)")
        for cmd in query.commands():
            self._send(cmd)
        self._send("(check-sat)")

        errors: List[str] = []
        verdict: Optional[str] = None
        while verdict is None:
            line = self._readline(deadline)
            if line is None:
                self._restart("wall-clock guard expired")
                return Unknown("timeout")
            word = line.strip()
            if word in ("sat", "unsat", "unknown"):
                verdict = word
            elif word.startswith("(error"):
                errors.append(word)
            elif word:
                logger.warning("unexpected solver output: %s", word)

        result: SolverResult
        if errors:
            logger.warning("solver rejected query: %s", errors[0])
            result = Unknown("solver-error")
        elif verdict == "unsat":
            result = Unsat()
        elif verdict == "unknown":
            self._send("(get-info :reason-unknown)")
            info = self._read_sexpr(deadline) or ""
            reason = "timeout" if ("timeout" in info or "canceled" in info) else "solver-error"
            logger.debug("solver unknown: %s", info.strip())
            result = Unknown(reason)
        elif want_model:
            self._send("(get-model)")
            text = self._read_sexpr(deadline)
            if text is None:
                self._restart("no model before the wall-clock guard")
                return Unknown("timeout")
            model = model_values(text)
            for name in query.variables + query.hashes:
                model.setdefault(name, 0)
            result = Sat(model)
        else:
            result = Sat({})
        self._send("(pop 1)")
        return result


class CachingSolver:
    """
    Session wrapper used by the engine: answers are cached per constraint set
    and calls are counted for exploration statistics.
    """

    def __init__(self, session: SolverSession, timeout_s: float):
        self.session = session
        self.timeout_s = timeout_s
        self.calls = 0
        self.unknowns = 0
        self._cache: Dict[FrozenSet[bytes], Tuple[SolverResult, bool]] = {}

    def check(self, constraints: Sequence[SymValue], want_model: bool = False) -> SolverResult:
        key = frozenset(c.fp for c in constraints)
        cached = self._cache.get(key)
        if cached is not None:
            result, has_model = cached
            if has_model or not want_model or not isinstance(result, Sat):
                return result
        self.calls += 1
        result = self.session.check(list(constraints), self.timeout_s, want_model=want_model)
        if isinstance(result, Unknown):
            self.unknowns += 1
        self._cache[key] = (result, want_model)
        return result

    def is_sat(self, constraints: Sequence[SymValue]) -> Tuple[bool, bool]:
        """(satisfiable, decided) for a constraint set."""
        result = self.check(constraints)
        if isinstance(result, Unknown):
            return False, False
        return isinstance(result, Sat), True


def check(constraints: Sequence[SymValue], timeout_s: float = 10.0, solver_path: Optional[str] = None) -> SolverResult:
    """One-shot check on a fresh solver process."""
    with SolverSession(solver_path, timeout_s) as session:
        return session.check(constraints, timeout_s)
