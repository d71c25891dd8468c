"""
Validation runner - replays candidates on private forks, in parallel.
"""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Dict, List, Optional, Sequence

from tracehound.chainstate.state import ChainState
from tracehound.config.settings import ValidationConfig
from tracehound.symbolic.candidate import Candidate
from tracehound.validation.validators import Verdict, VerdictStatus, validator_for

logger = logging.getLogger(__name__)


class ValidationRunner:
    """
    Validates candidates against one starting state.

    `alternates` maps a subject address to an earlier snapshot in which it
    is still alive; candidates whose subject is dead in `start` are replayed
    there instead.
    """

    def __init__(
        self,
        config: Optional[ValidationConfig] = None,
        workers: int = 1,
        alternates: Optional[Dict[int, ChainState]] = None,
    ):
        self.config = config or ValidationConfig()
        self.workers = max(1, workers)
        self.alternates = dict(alternates or {})

    def state_for(self, start: ChainState, c: Candidate) -> ChainState:
        if not start.is_contract(c.subject) and c.subject in self.alternates:
            logger.info("replaying 0x%040x on its alternate snapshot", c.subject)
            return self.alternates[c.subject]
        return start

    def validate(self, start: ChainState, c: Candidate) -> Verdict:
        try:
            return validator_for(c.category, self.config).validate(self.state_for(start, c), c)
        except Exception as exc:
            logger.exception("validation of 0x%040x failed", c.subject)
            return Verdict(c, VerdictStatus.NOT_VALIDATABLE, reason=f"replay error: {exc}")

    def run(self, start: ChainState, candidates: Sequence[Candidate], workers: Optional[int] = None) -> List[Verdict]:
        """Verdicts in candidate order."""
        workers = max(1, workers or self.workers)
        if workers == 1 or len(candidates) <= 1:
            return [self.validate(start, c) for c in candidates]
        results: List[Optional[Verdict]] = [None] * len(candidates)
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = {executor.submit(self.validate, start, c): i for i, c in enumerate(candidates)}
            for future in as_completed(futures):
                results[futures[future]] = future.result()
        return [v for v in results if v is not None]
