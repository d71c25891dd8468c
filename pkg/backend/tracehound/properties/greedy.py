"""Ether acceptance check and greedy classification for one subject."""

from typing import Tuple

from tracehound.bytecode import Program
from tracehound.chainstate.state import ChainState
from tracehound.config.settings import AnalysisConfig, Category
from tracehound.properties.predicates import GreedyCategory, greedy_classify
from tracehound.symbolic.candidate import EtherAcceptance


def accepts_ether(program: Program, start: ChainState, subject: int, cfg: AnalysisConfig) -> EtherAcceptance:
    """
    True iff one invocation carrying 0 < CALLVALUE <= 1 ether reaches STOP or
    RETURN on some feasible path. A budget expiry answers False with
    `incomplete` set.
    """
    # imported here: the engine depends on tracehound.properties
    from tracehound.symbolic.engine import SymbolicEngine

    engine = SymbolicEngine(program, start, subject, cfg.for_category(Category.GREEDY))
    try:
        return engine.accepts_ether()
    finally:
        engine.close()


def classify(program: Program, start: ChainState, subject: int, cfg: AnalysisConfig) -> Tuple[GreedyCategory, EtherAcceptance]:
    acceptance = accepts_ether(program, start, subject, cfg)
    return greedy_classify(program, bool(acceptance)), acceptance
