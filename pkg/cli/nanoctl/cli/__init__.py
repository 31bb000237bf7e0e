"""
CLI interface for the nanoparticle design pipeline
"""

from .main import app

__all__ = ["app"]
