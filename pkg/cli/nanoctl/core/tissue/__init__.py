"""
Stochastic nanoparticle transport, binding and cell kill along scenario chains
"""

from .meanfield import MeanFieldSolution, mean_field
from .simulate import (
    DEFAULT_EPSILON,
    DEFAULT_SAMPLE_INTERVAL,
    TissueState,
    Trajectory,
    TreatmentOutcome,
    outcome_metrics,
    simulate,
    simulate_ssa,
    simulate_tau,
)
from .system import TissueSystem, build_system
from .trajectory import profile_frame, trajectory_frame, write_profile, write_trajectory

__all__ = [
    "DEFAULT_EPSILON",
    "DEFAULT_SAMPLE_INTERVAL",
    "MeanFieldSolution",
    "TissueState",
    "TissueSystem",
    "Trajectory",
    "TreatmentOutcome",
    "build_system",
    "mean_field",
    "outcome_metrics",
    "profile_frame",
    "simulate",
    "simulate_ssa",
    "simulate_tau",
    "trajectory_frame",
    "write_profile",
    "write_trajectory",
]
