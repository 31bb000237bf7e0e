"""
Plot-ready CSV dumps of tissue simulations
"""

from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from ..exceptions import SimulationError
from .simulate import SAMPLE_FIELDS, TissueState

TRAJECTORY_COLUMNS = ["t", "compartment", "species", "np_f", "r", "c", "np_i", "alive"]


def trajectory_frame(state: TissueState) -> pd.DataFrame:
    """Long-format trajectory, one row per (time, compartment, species)"""
    trajectory = state.trajectory
    if trajectory is None:
        raise SimulationError("Simulation was run without trajectory sampling")

    n_times, n_species, n_comp, _ = trajectory.values.shape
    # index order: time, compartment, species
    values = trajectory.values.transpose(0, 2, 1, 3).reshape(-1, len(SAMPLE_FIELDS))
    frame = pd.DataFrame(values, columns=list(SAMPLE_FIELDS))
    frame.insert(0, "species", np.tile(np.arange(1, n_species + 1), n_times * n_comp))
    frame.insert(0, "compartment", np.tile(np.repeat(np.arange(n_comp), n_species), n_times))
    frame.insert(0, "t", np.repeat(trajectory.times, n_comp * n_species))
    frame["alive"] = np.repeat(trajectory.alive, n_species, axis=1).ravel()
    return frame[TRAJECTORY_COLUMNS]


def write_trajectory(state: TissueState, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    trajectory_frame(state).to_csv(path, index=False)


def profile_frame(states: Sequence[TissueState]) -> pd.DataFrame:
    """
    Penetration profile across replicate runs: mean final free, bound and
    internalised counts per compartment and species, plus the kill probability
    of each compartment with its mean death time over the runs that killed it.
    """
    if not states:
        raise SimulationError("No simulations to aggregate")
    free = np.stack([s.free for s in states]).mean(axis=0)
    complexes = np.stack([s.complexes for s in states]).mean(axis=0)
    internalized = np.stack([s.internalized for s in states]).mean(axis=0)
    killed = np.stack([s.dead() for s in states]).mean(axis=0)
    n_species, n_comp = free.shape
    death_times = []
    for c in range(n_comp):
        times = [t for t in (s.death_time_of(c) for s in states) if t is not None]
        death_times.append(float(np.mean(times)) if times else np.nan)

    rows = []
    for c in range(n_comp):
        for s in range(n_species):
            rows.append(
                {
                    "compartment": c,
                    "species": s + 1,
                    "np_f_mean": free[s, c],
                    "c_mean": complexes[s, c],
                    "np_i_mean": internalized[s, c],
                    "kill_probability": killed[c],
                    "death_time_mean": death_times[c],
                }
            )
    return pd.DataFrame(rows)


def write_profile(states: Sequence[TissueState], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    profile_frame(states).to_csv(path, index=False)
