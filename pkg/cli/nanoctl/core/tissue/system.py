"""
Reaction-channel assembly for a scenario chain

Per compartment c and nanoparticle species s the network is::

    0          -> NP_F[s,c]               release, VP compartments, NP0/T
    NP_F[s,c]  -> NP_F[s,c-1]             hop left,  D/L^2
    NP_F[s,c]  -> NP_F[s,c+1]             hop right, D/L^2
    NP_F + R   -> C[s,c]                  bind, k_a/(N_A V_c) per pair, living cells
    C[s,c]     -> NP_F + R                unbind, k_d
    C[s,c]     -> NP_I[s,c] + R           internalise, k_i (receptor recycled)

Both chain ends reflect. Species share the receptor pool of a cell.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..dosimetry import (
    AVOGADRO,
    DrugModel,
    HostModel,
    NanoparticleDesign,
    check_cell_length,
    lethal_threshold,
)
from ..exceptions import ValidationError
from ..scenario import CompartmentKind, Scenario

MAX_SPECIES = 2
NO_THRESHOLD = np.iinfo(np.int64).max

# compartment codes used by the kernels
KIND_VP = 0
KIND_CC = 1
KIND_CSC = 2
KIND_ECM = 3

_KIND_CODES = {
    CompartmentKind.VP: KIND_VP,
    CompartmentKind.CC: KIND_CC,
    CompartmentKind.CSC: KIND_CSC,
    CompartmentKind.ECM: KIND_ECM,
}


@dataclass(frozen=True)
class TissueSystem:
    """Rates and initial condition of one tissue simulation"""

    scenario: Scenario
    designs: Tuple[NanoparticleDesign, ...]
    kinds: np.ndarray
    lethal_thresholds: np.ndarray
    lethal_species: np.ndarray
    release_rate: np.ndarray
    hop_rate: np.ndarray
    bind_rate: np.ndarray
    unbind_rate: np.ndarray
    internal_rate: np.ndarray
    receptors_per_cell: int
    t_end: float
    release_end: float
    initial_free: np.ndarray

    @property
    def n_species(self) -> int:
        return len(self.designs)

    @property
    def n_compartments(self) -> int:
        return len(self.kinds)

    @property
    def is_cell(self) -> np.ndarray:
        return (self.kinds == KIND_CC) | (self.kinds == KIND_CSC)

    def rate_table(self) -> np.ndarray:
        """(species, 4) table of hop, bind, unbind and internalisation rates"""
        return np.column_stack(
            [self.hop_rate, self.bind_rate, self.unbind_rate, self.internal_rate]
        ).astype(np.float64)


def _lethal_species(kinds: np.ndarray, n_species: int) -> np.ndarray:
    # CC dies from NP1 only, CSC from NP2 only
    species = np.full(len(kinds), -1, dtype=np.int64)
    species[kinds == KIND_CC] = 0
    if n_species > 1:
        species[kinds == KIND_CSC] = 1
    return species


def build_system(
    scenario: Scenario,
    designs: Sequence[NanoparticleDesign],
    drug: DrugModel,
    host: HostModel,
    t_end: Optional[float] = None,
    initial_free: Optional[np.ndarray] = None,
    lethal_thresholds: Optional[Sequence[int]] = None,
) -> TissueSystem:
    """
    Assemble the channel rates for ``scenario`` with one (NP1) or two
    (NP1 against CC, NP2 against CSC) nanoparticle species.
    """
    designs = tuple(designs)
    if not 1 <= len(designs) <= MAX_SPECIES:
        raise ValidationError(f"Expected 1 or 2 nanoparticle designs, got {len(designs)}")

    kinds = np.array([_KIND_CODES[k] for k in scenario.compartments], dtype=np.int64)
    n_species, n_comp = len(designs), len(kinds)

    if lethal_thresholds is None:
        thresholds = np.array(
            [lethal_threshold(d.payload_count, drug, host.cell_length) for d in designs],
            dtype=np.int64,
        )
    else:
        thresholds = np.array(lethal_thresholds, dtype=np.int64)
        if thresholds.shape != (n_species,) or (thresholds < 1).any():
            raise ValidationError("One positive lethal threshold is required per species")

    circulation = host.circulation_time
    release = np.zeros((n_species, n_comp), dtype=np.float64)
    for s, design in enumerate(designs):
        release[s, kinds == KIND_VP] = design.extravasated_count / circulation

    length_m = scenario.length_per_compartment
    check_cell_length(host.cell_length, length_m, f"scenario {scenario.id} compartment length")
    volume_l = length_m**3 * 1e3
    hop = np.array([d.diffusion * 1e-4 / length_m**2 for d in designs], dtype=np.float64)
    bind = np.array(
        [d.binding_rate / (AVOGADRO * volume_l) for d in designs], dtype=np.float64
    )

    if initial_free is None:
        free = np.zeros((n_species, n_comp), dtype=np.int64)
    else:
        free = np.asarray(initial_free, dtype=np.int64)
        if free.shape != (n_species, n_comp) or (free < 0).any():
            raise ValidationError(
                "initial_free must be a non-negative (species, compartments) array"
            )

    end = circulation if t_end is None else float(t_end)
    if end <= 0:
        raise ValidationError(f"t_end must be > 0, got {end}")

    return TissueSystem(
        scenario=scenario,
        designs=designs,
        kinds=kinds,
        lethal_thresholds=thresholds,
        lethal_species=_lethal_species(kinds, n_species),
        release_rate=release,
        hop_rate=hop,
        bind_rate=bind,
        unbind_rate=np.array([d.dissoc_rate for d in designs], dtype=np.float64),
        internal_rate=np.array([d.internal_rate for d in designs], dtype=np.float64),
        receptors_per_cell=host.receptors_per_cell,
        t_end=end,
        release_end=circulation,
        initial_free=free,
    )
