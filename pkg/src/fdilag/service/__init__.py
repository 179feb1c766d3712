"""HTTP service exposing the toolkit's pipeline."""

from .app import create_app

__all__ = ["create_app"]
