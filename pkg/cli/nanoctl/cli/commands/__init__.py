"""
CLI command modules for nanoctl
"""

from . import dose_cmd, evaluate_cmd, grow_cmd, optimize_cmd, sample_cmd, simulate_cmd

__all__ = [
    "grow_cmd",
    "sample_cmd",
    "simulate_cmd",
    "optimize_cmd",
    "evaluate_cmd",
    "dose_cmd",
]
