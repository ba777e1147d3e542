"""FastAPI layer over the core selection engine."""

from .app import app, create_app

__all__ = ["app", "create_app"]
