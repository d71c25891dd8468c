"""
cli - command-line front end for tracehound.

Provides the `tracehound` command; the analysis itself lives in the
`tracehound` package under `backend/`.
"""

__version__ = "0.3.0"

from .cli import main

__all__ = ["main", "__version__"]
