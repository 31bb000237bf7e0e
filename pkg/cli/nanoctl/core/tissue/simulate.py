"""
Tissue simulation entry points and treatment outcome tallies
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..exceptions import SimulationError, ValidationError
from ..scenario import CompartmentKind, Scenario
from ..seeding import MAX_KERNEL_SEED
from .kernel import run_kernel
from .system import TissueSystem

SSA = 0
TAU = 1
DEFAULT_EPSILON = 0.03
MAX_EPSILON = 0.1
DEFAULT_SAMPLE_INTERVAL = 600.0

# sampled quantity order along the last trajectory axis
SAMPLE_FIELDS = ("np_f", "r", "c", "np_i")


@dataclass
class Trajectory:
    """State sampled at fixed times; ``values`` is (time, species, compartment, field)"""

    times: np.ndarray
    values: np.ndarray
    alive: np.ndarray


@dataclass
class TissueState:
    """Species counts, cell status and clock at the end of a simulation"""

    clock: float
    free: np.ndarray
    complexes: np.ndarray
    internalized: np.ndarray
    receptors: np.ndarray
    alive: np.ndarray
    is_cell: np.ndarray
    death_time: np.ndarray
    injected_total: np.ndarray
    trajectory: Optional[Trajectory] = None

    def dead(self) -> np.ndarray:
        """Cell compartments that died during the simulation"""
        return self.is_cell & (self.alive == 0)

    def death_time_of(self, compartment: int) -> Optional[float]:
        value = float(self.death_time[compartment])
        return None if value < 0 else value


@dataclass
class TreatmentOutcome:
    """Kill tallies of one simulated scenario"""

    cc_total: int
    cc_killed: int
    csc_total: int
    csc_killed: int
    final_internalized: np.ndarray
    injected_total: np.ndarray

    @property
    def cc_fraction(self) -> float:
        return self.cc_killed / self.cc_total if self.cc_total else 1.0

    @property
    def csc_fraction(self) -> float:
        return self.csc_killed / self.csc_total if self.csc_total else 1.0


def outcome_metrics(state: TissueState, scenario: Scenario) -> TreatmentOutcome:
    """Count killed CC and CSC compartments; empty target sets count as full kill"""
    labels = np.array([k.value for k in scenario.compartments])
    if len(labels) != len(state.alive):
        raise ValidationError("State and scenario disagree on the compartment count")
    dead = state.alive == 0
    cc = labels == CompartmentKind.CC.value
    csc = labels == CompartmentKind.CSC.value
    return TreatmentOutcome(
        cc_total=int(cc.sum()),
        cc_killed=int((cc & dead).sum()),
        csc_total=int(csc.sum()),
        csc_killed=int((csc & dead).sum()),
        final_internalized=state.internalized.copy(),
        injected_total=state.injected_total.copy(),
    )


def _sample_times(t_end: float, interval: Optional[float]) -> np.ndarray:
    if interval is None:
        return np.zeros(0, dtype=np.float64)
    if interval <= 0:
        raise ValidationError(f"Sample interval must be > 0, got {interval}")
    count = int(np.floor(t_end / interval + 1e-9)) + 1
    return np.arange(count, dtype=np.float64) * interval


def _run(
    system: TissueSystem,
    method: int,
    seed: int,
    epsilon: float,
    sample_interval: Optional[float],
) -> Tuple[TissueState, TreatmentOutcome]:
    if not 0 <= int(seed) <= MAX_KERNEL_SEED:
        raise ValidationError(f"Kernel seed must lie in [0, {MAX_KERNEL_SEED}], got {seed}")

    n_species, n_comp = system.n_species, system.n_compartments
    is_cell = system.is_cell
    free = system.initial_free.astype(np.int64, copy=True)
    complexes = np.zeros((n_species, n_comp), dtype=np.int64)
    internalized = np.zeros((n_species, n_comp), dtype=np.int64)
    receptors = np.where(is_cell, system.receptors_per_cell, 0).astype(np.int64)
    alive = is_cell.astype(np.int64)
    death_time = np.full(n_comp, -1.0)
    injected = free.sum(axis=1).astype(np.int64)

    times = _sample_times(system.t_end, sample_interval)
    samples = np.zeros((len(times), n_species, n_comp, len(SAMPLE_FIELDS)), dtype=np.int64)
    alive_out = np.zeros((len(times), n_comp), dtype=np.int64)

    clock = run_kernel(
        method,
        int(seed),
        float(epsilon),
        float(system.t_end),
        float(system.release_end),
        free,
        complexes,
        internalized,
        receptors,
        alive,
        injected,
        death_time,
        system.release_rate.astype(np.float64),
        system.rate_table(),
        system.lethal_species.astype(np.int64),
        system.lethal_thresholds.astype(np.int64),
        times,
        samples,
        alive_out,
    )

    if (free < 0).any() or (complexes < 0).any() or (receptors < 0).any():
        raise SimulationError("Negative population after integration", {"seed": int(seed)})

    state = TissueState(
        clock=float(clock),
        free=free,
        complexes=complexes,
        internalized=internalized,
        receptors=receptors,
        alive=alive,
        is_cell=is_cell,
        death_time=death_time,
        injected_total=injected,
        trajectory=Trajectory(times, samples, alive_out) if len(times) else None,
    )
    return state, outcome_metrics(state, system.scenario)


def simulate_ssa(
    system: TissueSystem, seed: int, sample_interval: Optional[float] = None
) -> Tuple[TissueState, TreatmentOutcome]:
    """Exact Gillespie simulation to ``system.t_end``; deaths are checked after every event"""
    return _run(system, SSA, seed, DEFAULT_EPSILON, sample_interval)


def simulate_tau(
    system: TissueSystem,
    seed: int,
    epsilon: float = DEFAULT_EPSILON,
    sample_interval: Optional[float] = None,
) -> Tuple[TissueState, TreatmentOutcome]:
    """
    Tau-leaping simulation. Leaps keep the expected relative propensity change
    below ``epsilon``; channels with fewer than 10 reactant copies fire singly
    and leaps too short to pay off fall back to exact steps. Deaths are checked
    at leap boundaries.
    """
    if not 0 < epsilon <= MAX_EPSILON:
        raise ValidationError(f"epsilon must lie in (0, {MAX_EPSILON}], got {epsilon}")
    return _run(system, TAU, seed, epsilon, sample_interval)


def simulate(
    system: TissueSystem,
    seed: int,
    backend: str = "ssa",
    epsilon: float = DEFAULT_EPSILON,
    sample_interval: Optional[float] = None,
) -> Tuple[TissueState, TreatmentOutcome]:
    """Dispatch to the named backend (``ssa`` or ``tau``)"""
    if backend == "ssa":
        return simulate_ssa(system, seed, sample_interval)
    if backend == "tau":
        return simulate_tau(system, seed, epsilon, sample_interval)
    raise ValidationError(f"Unknown tissue backend: {backend}")

