"""
Core modules for nanoctl
"""

from .config import PipelineConfig
from .exceptions import NanoCtlError

__all__ = ["NanoCtlError", "PipelineConfig"]
