"""Route modules for FastAPI endpoints."""

from tracehound.routes import analysis

__all__ = ["analysis"]
