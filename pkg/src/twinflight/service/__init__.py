"""Gateway service: FastAPI app plus the background session runtime."""

from .app import create_app
from .runtime import SessionManager

__all__ = ["SessionManager", "create_app"]
