"""
tracehound - symbolic trace analysis for EVM bytecode.

Finds prodigal, suicidal and greedy contracts by exploring multi-transaction
symbolic traces, then confirms each finding by replaying the solver's
transactions on a private fork of a chain snapshot.
"""

import sys
from pathlib import Path

# Allow `tracehound` imports when running straight from a checkout.
_backend_dir = Path(__file__).resolve().parent.parent
if str(_backend_dir) not in sys.path:
    sys.path.insert(0, str(_backend_dir))

__version__ = "0.3.0"
__all__ = ["__version__"]
