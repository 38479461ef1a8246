"""HTTP facade over the verification engine (FastAPI + pydantic models)."""

from .app import create_app

__all__ = ["create_app"]
