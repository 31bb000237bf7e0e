"""
Deterministic mean-field reference of the tissue network

Same channels as the stochastic kernels with particle counts treated as
continuous concentrations. No death rule is applied, so the reference is only
meaningful while cells stay alive (e.g. with a very large lethal threshold).
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from ..exceptions import SimulationError, ValidationError
from .system import TissueSystem


@dataclass
class MeanFieldSolution:
    """Mean counts at ``times``; arrays are (time, species, compartment) or (time, compartment)"""

    times: np.ndarray
    free: np.ndarray
    complexes: np.ndarray
    internalized: np.ndarray
    receptors: np.ndarray


def _unpack(y: np.ndarray, n_species: int, n_comp: int):
    block = n_species * n_comp
    free = y[:block].reshape(n_species, n_comp)
    complexes = y[block : 2 * block].reshape(n_species, n_comp)
    internalized = y[2 * block : 3 * block].reshape(n_species, n_comp)
    receptors = y[3 * block :]
    return free, complexes, internalized, receptors


def mean_field(
    system: TissueSystem,
    t_eval: np.ndarray,
    method: str = "LSODA",
    rtol: float = 1e-8,
    atol: float = 1e-6,
) -> MeanFieldSolution:
    """Integrate the mean-field equations from the system's initial condition"""
    n_species, n_comp = system.n_species, system.n_compartments
    t_eval = np.asarray(t_eval, dtype=np.float64)
    cells = system.is_cell.astype(np.float64)
    hop = system.hop_rate[:, None]
    bind = system.bind_rate[:, None]
    unbind = system.unbind_rate[:, None]
    internal = system.internal_rate[:, None]
    release = system.release_rate
    release_end = system.release_end

    # number of neighbours each compartment can hop to
    exits = np.full(n_comp, 2.0)
    exits[0] = exits[-1] = 1.0

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        free, complexes, _, receptors = _unpack(y, n_species, n_comp)
        inflow = np.zeros_like(free)
        inflow[:, 1:] += hop * free[:, :-1]
        inflow[:, :-1] += hop * free[:, 1:]
        binding = bind * free * receptors[None, :] * cells
        unbinding = unbind * complexes * cells
        uptake = internal * complexes * cells
        source = release if t < release_end else 0.0

        d_free = source + inflow - hop * exits * free - binding + unbinding
        d_complexes = binding - unbinding - uptake
        d_internalized = uptake
        d_receptors = (unbinding + uptake - binding).sum(axis=0)
        return np.concatenate(
            [d_free.ravel(), d_complexes.ravel(), d_internalized.ravel(), d_receptors]
        )

    receptors0 = np.where(system.is_cell, float(system.receptors_per_cell), 0.0)
    y0 = np.concatenate(
        [
            system.initial_free.astype(np.float64).ravel(),
            np.zeros(2 * n_species * n_comp),
            receptors0,
        ]
    )
    if not len(t_eval) or t_eval[0] < 0 or t_eval[-1] <= 0 or (np.diff(t_eval) < 0).any():
        raise ValidationError("t_eval must be non-empty, non-negative, increasing and end after 0")
    t_final = float(t_eval[-1])
    # the release source switches off at release_end; integrate each side separately
    breaks = [0.0, t_final]
    if 0.0 < release_end < t_final:
        breaks.insert(1, release_end)

    times, states = [], []
    for start, stop in zip(breaks[:-1], breaks[1:]):
        last = stop == t_final
        inside = (t_eval >= start) & ((t_eval <= stop) if last else (t_eval < stop))
        result = solve_ivp(
            rhs,
            (start, stop),
            y0,
            method=method,
            dense_output=True,
            rtol=rtol,
            atol=atol,
        )
        if not result.success:
            raise SimulationError(f"Mean-field integration failed: {result.message}")
        if inside.any():
            times.append(t_eval[inside])
            states.append(result.sol(t_eval[inside]))
        y0 = result.y[:, -1]

    y = np.concatenate(states, axis=1)
    frames = [_unpack(y[:, i], n_species, n_comp) for i in range(y.shape[1])]
    return MeanFieldSolution(
        times=np.concatenate(times),
        free=np.stack([f[0] for f in frames]),
        complexes=np.stack([f[1] for f in frames]),
        internalized=np.stack([f[2] for f in frames]),
        receptors=np.stack([f[3] for f in frames]),
    )
