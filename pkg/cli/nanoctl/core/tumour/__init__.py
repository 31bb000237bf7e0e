"""
Virtual tumour module

Lattice tumour growth with vessel points, oxygen-driven proliferation and
necrosis, and cancer-stem-cell dynamics.
"""

from .model import (
    GrowthResult,
    TumourConfig,
    TumourState,
    grow_until,
    init,
    sample_division,
    step,
)
from .snapshot import (
    Agent,
    AgentType,
    TumourSnapshot,
    csc_fraction,
    read_snapshot,
    type_counts,
    write_snapshot,
)

__all__ = [
    "Agent",
    "AgentType",
    "GrowthResult",
    "TumourConfig",
    "TumourSnapshot",
    "TumourState",
    "csc_fraction",
    "grow_until",
    "init",
    "read_snapshot",
    "sample_division",
    "step",
    "type_counts",
    "write_snapshot",
]
