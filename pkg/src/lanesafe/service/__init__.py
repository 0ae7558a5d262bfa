"""HTTP service: pydantic models at the boundary, core dataclasses inside."""

from .app import app, create_app

__all__ = ["app", "create_app"]
