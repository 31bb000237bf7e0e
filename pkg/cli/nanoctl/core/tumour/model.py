"""
Virtual tumour growth on a voxel lattice

A cellular automaton seeded with a single cancer cell. Vessel points (VPs)
secrete oxygen and grow as a branching network; cancer cells (CC) proliferate
when oxygenated and turn necrotic when starved; cancer stem cells (CSC) arise
through dedifferentiation or stem-cell division, never die and go dormant
under hypoxia. One voxel holds at most one agent (edge = one cell length).
"""

import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from rich.console import Console

from ..exceptions import ValidationError
from . import oxygen as o2
from .snapshot import EMPTY, KIND_CODES, AgentType, TumourSnapshot

console = Console(stderr=True)

CC = KIND_CODES[AgentType.CC]
CSC = KIND_CODES[AgentType.CSC]
VP = KIND_CODES[AgentType.VP]
NEC = KIND_CODES[AgentType.NECROTIC]

FACE_DIRECTIONS = np.array(
    [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)], dtype=np.int64
)

Voxel = Tuple[int, int, int]


def _default_vessels() -> List[Voxel]:
    return [(28, 28, 40), (52, 28, 40), (28, 52, 40), (52, 52, 40), (40, 40, 26), (40, 40, 54)]


class TumourConfig(BaseModel):
    """Growth rules, vessel and oxygen parameters of the virtual tumour"""

    model_config = ConfigDict(extra="forbid")

    lattice_dims: Tuple[int, int, int] = Field(default=(80, 80, 80), description="Voxels per axis")
    dediff_prob: float = Field(default=0.005, ge=0, le=1, description="CC division -> CC + CSC")
    csc_asym_prob: float = Field(default=0.99, ge=0, le=1, description="CSC -> CSC + CC")
    csc_sym_two_csc_prob: float = Field(
        default=0.99, ge=0, le=1, description="Symmetric CSC division -> CSC + CSC"
    )
    vp_initial_positions: List[Voxel] = Field(default_factory=_default_vessels)
    vp_max_count: int = Field(default=4000, ge=0, description="Vessel point cap")
    vp_branch_freq: float = Field(default=0.05, ge=0, le=1, description="Branching per extension")
    o2_secretion: float = Field(default=10.0, ge=0, description="Secretion per VP voxel per step")
    o2_decay: float = Field(default=0.01, ge=0, description="Decay, 1/step")
    o2_diffusion: float = Field(default=1.0, gt=0, description="Diffusion, voxel^2/step")
    o2_uptake: float = Field(default=0.02, ge=0, description="Uptake per live cell, 1/step")
    o2_prolif_threshold: float = Field(default=0.1, ge=0)
    o2_necrosis_threshold: float = Field(default=0.05, ge=0)
    o2_sweeps: int = Field(default=20, ge=1, description="Jacobi sweeps per step")
    o2_init_sweeps: int = Field(default=400, ge=1, description="Jacobi sweeps at initialisation")
    division_prob_per_step: float = Field(default=0.5, ge=0, le=1)
    target_cell_count: int = Field(default=50_000, ge=1)
    max_steps: int = Field(default=5_000, ge=1)
    stall_patience: int = Field(default=50, ge=1, description="Steps without growth before stall")
    seed: Optional[int] = Field(
        default=None, ge=0, description="Growth seed used when no master seed is set"
    )

    @model_validator(mode="after")
    def check_thresholds(self) -> "TumourConfig":
        if self.o2_necrosis_threshold >= self.o2_prolif_threshold:
            raise ValueError("o2_necrosis_threshold must be below o2_prolif_threshold")
        if min(self.lattice_dims) < 1:
            raise ValueError("lattice_dims must be positive")
        return self


@dataclass
class VesselTip:
    """Growing end of a vessel branch"""

    pos: np.ndarray
    direction: np.ndarray


@dataclass
class TumourState:
    """Mutable lattice state advanced by ``step``"""

    config: TumourConfig
    rng: np.random.Generator
    kinds: np.ndarray
    ids: np.ndarray
    dormant: np.ndarray
    oxygen: np.ndarray
    next_id: int
    step_count: int = 0
    tips: List[VesselTip] = field(default_factory=list)
    vp_directions: Dict[int, Tuple[int, int, int]] = field(default_factory=dict)
    lattice_full: bool = False

    @property
    def vp_count(self) -> int:
        return int(np.count_nonzero(self.kinds == VP))

    @property
    def live_count(self) -> int:
        return int(np.count_nonzero((self.kinds == CC) | (self.kinds == CSC)))

    def snapshot(self) -> TumourSnapshot:
        """Immutable copy of the current state"""
        occupied = np.argwhere(self.kinds != EMPTY)
        ids = self.ids[occupied[:, 0], occupied[:, 1], occupied[:, 2]]
        order = np.argsort(ids, kind="stable")
        occupied = occupied[order]
        return TumourSnapshot(
            step=self.step_count,
            dims=tuple(int(d) for d in self.kinds.shape),  # type: ignore[arg-type]
            ids=ids[order].astype(np.int64),
            kinds=self.kinds[occupied[:, 0], occupied[:, 1], occupied[:, 2]].astype(np.int8),
            positions=occupied.astype(np.int64),
            dormant=self.dormant[occupied[:, 0], occupied[:, 1], occupied[:, 2]].copy(),
            oxygen=self.oxygen.copy(),
        )


@dataclass(frozen=True)
class GrowthResult:
    """Outcome of ``grow_until``"""

    snapshot: TumourSnapshot
    stalled: bool
    steps: int


def _in_lattice(pos: np.ndarray, dims: Tuple[int, ...]) -> bool:
    return bool((pos >= 0).all() and (pos < np.asarray(dims)).all())


def _secretion(state: TumourState) -> np.ndarray:
    return np.where(state.kinds == VP, state.config.o2_secretion, 0.0)


def _uptake(state: TumourState) -> np.ndarray:
    live = (state.kinds == CC) | (state.kinds == CSC)
    return np.where(live, state.config.o2_uptake, 0.0)


def _relax_oxygen(state: TumourState, sweeps: int) -> None:
    cfg = state.config
    state.oxygen = o2.relax(
        state.oxygen, _secretion(state), _uptake(state), cfg.o2_diffusion, cfg.o2_decay, sweeps
    )


def _perpendicular(direction: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    choices = [d for d in FACE_DIRECTIONS if int(np.dot(d, direction)) == 0]
    return choices[int(rng.integers(len(choices)))].copy()


def init(config: TumourConfig, vp_directions: Optional[List[Voxel]] = None) -> TumourState:
    """
    Single CC at the lattice centre plus the configured vessel points, with the
    oxygen field relaxed to the steady state of the initial sources.
    """
    dims = tuple(config.lattice_dims)
    if not config.vp_initial_positions:
        raise ValidationError("At least one initial vessel point is required")

    centre = tuple(d // 2 for d in dims)
    seen = {centre}
    errors = []
    for pos in config.vp_initial_positions:
        p = tuple(int(v) for v in pos)
        if not _in_lattice(np.array(p), dims):
            errors.append({"path": "vp_initial_positions", "message": f"{p} outside lattice"})
        elif p in seen:
            errors.append({"path": "vp_initial_positions", "message": f"{p} overlaps an agent"})
        seen.add(p)
    if errors:
        raise ValidationError("Invalid initial vessel points", errors)
    if vp_directions is not None and len(vp_directions) != len(config.vp_initial_positions):
        raise ValidationError("One direction is required per initial vessel point")

    rng = np.random.default_rng(config.seed)
    state = TumourState(
        config=config,
        rng=rng,
        kinds=np.zeros(dims, dtype=np.int8),
        ids=np.full(dims, -1, dtype=np.int64),
        dormant=np.zeros(dims, dtype=bool),
        oxygen=np.zeros(dims, dtype=np.float64),
        next_id=0,
    )
    _place(state, np.array(centre), CC)
    for i, pos in enumerate(config.vp_initial_positions):
        p = np.array(pos, dtype=np.int64)
        if vp_directions is not None:
            direction = np.array(vp_directions[i], dtype=np.int64)
        else:
            direction = FACE_DIRECTIONS[int(rng.integers(len(FACE_DIRECTIONS)))].copy()
        agent_id = _place(state, p, VP)
        state.vp_directions[agent_id] = tuple(int(v) for v in direction)  # type: ignore[assignment]
        state.tips.append(VesselTip(pos=p, direction=direction))

    _relax_oxygen(state, config.o2_init_sweeps)
    return state


def _place(state: TumourState, pos: np.ndarray, code: int) -> int:
    x, y, z = (int(v) for v in pos)
    agent_id = state.next_id
    state.kinds[x, y, z] = code
    state.ids[x, y, z] = agent_id
    state.dormant[x, y, z] = False
    state.next_id += 1
    return agent_id


def sample_division(parent: int, config: TumourConfig, rng: np.random.Generator) -> Tuple[int, int]:
    """
    Draw (parent kind after division, daughter kind) for a dividing CC or CSC.

    CC  -> CC + CC, or CC + CSC with ``dediff_prob``
    CSC -> CSC + CC (asymmetric), else symmetric CSC + CSC or CC + CC
    """
    if parent == CC:
        return (CC, CSC) if rng.random() < config.dediff_prob else (CC, CC)
    if parent == CSC:
        if rng.random() < config.csc_asym_prob:
            return CSC, CC
        if rng.random() < config.csc_sym_two_csc_prob:
            return CSC, CSC
        return CC, CC
    raise ValidationError(f"Agent kind {parent} cannot divide")


def _free_neighbour_count(kinds: np.ndarray) -> np.ndarray:
    free = np.pad(kinds == EMPTY, 1, mode="constant", constant_values=False).astype(np.int8)
    return (
        free[:-2, 1:-1, 1:-1]
        + free[2:, 1:-1, 1:-1]
        + free[1:-1, :-2, 1:-1]
        + free[1:-1, 2:, 1:-1]
        + free[1:-1, 1:-1, :-2]
        + free[1:-1, 1:-1, 2:]
    )


def _divide_cells(state: TumourState) -> int:
    cfg = state.config
    dims = state.kinds.shape
    eligible = (
        ((state.kinds == CC) | ((state.kinds == CSC) & ~state.dormant))
        & (state.oxygen >= cfg.o2_prolif_threshold)
        & (_free_neighbour_count(state.kinds) > 0)
    )
    candidates = np.argwhere(eligible)
    state.lattice_full = len(candidates) == 0
    if not len(candidates):
        return 0

    rolls = state.rng.random(len(candidates))
    dividing = candidates[rolls < cfg.division_prob_per_step]
    dividing = dividing[state.rng.permutation(len(dividing))]

    placed = 0
    for pos in dividing:
        targets = pos + FACE_DIRECTIONS
        inside = ((targets >= 0) & (targets < np.asarray(dims))).all(axis=1)
        targets = targets[inside]
        targets = targets[state.kinds[targets[:, 0], targets[:, 1], targets[:, 2]] == EMPTY]
        if not len(targets):
            continue
        target = targets[int(state.rng.integers(len(targets)))]
        parent_kind, daughter_kind = sample_division(int(state.kinds[tuple(pos)]), cfg, state.rng)
        state.kinds[tuple(pos)] = parent_kind
        _place(state, target, daughter_kind)
        placed += 1
    return placed


def _grow_vessels(state: TumourState) -> None:
    cfg = state.config
    dims = state.kinds.shape
    count = state.vp_count
    next_tips: List[VesselTip] = []
    for tip in state.tips:
        if count >= cfg.vp_max_count:
            next_tips.append(tip)
            continue
        target = tip.pos + tip.direction
        if not _in_lattice(target, dims):
            continue
        if state.kinds[tuple(target)] != EMPTY:
            next_tips.append(tip)
            continue
        agent_id = _place(state, target, VP)
        state.vp_directions[agent_id] = tuple(int(v) for v in tip.direction)  # type: ignore
        count += 1
        next_tips.append(VesselTip(pos=target, direction=tip.direction))

        if count < cfg.vp_max_count and state.rng.random() < cfg.vp_branch_freq:
            branch_dir = _perpendicular(tip.direction, state.rng)
            branch_pos = target + branch_dir
            if _in_lattice(branch_pos, dims) and state.kinds[tuple(branch_pos)] == EMPTY:
                branch_id = _place(state, branch_pos, VP)
                state.vp_directions[branch_id] = tuple(int(v) for v in branch_dir)  # type: ignore
                count += 1
                next_tips.append(VesselTip(pos=branch_pos, direction=branch_dir))
    state.tips = next_tips


def step(state: TumourState) -> TumourState:
    """
    Advance one synchronous pass: relax oxygen, apply necrosis and dormancy,
    divide eligible cells in shuffled order, then extend vessel tips.
    """
    cfg = state.config
    _relax_oxygen(state, cfg.o2_sweeps)

    starving = (state.kinds == CC) & (state.oxygen < cfg.o2_necrosis_threshold)
    state.kinds[starving] = NEC

    csc = state.kinds == CSC
    state.dormant[:] = csc & (state.oxygen < cfg.o2_prolif_threshold)

    _divide_cells(state)
    _grow_vessels(state)
    state.step_count += 1
    return state


def grow_until(state: TumourState, target_cell_count: Optional[int] = None) -> GrowthResult:
    """Step until live CC+CSC reaches the target, or report a stall"""
    cfg = state.config
    target = cfg.target_cell_count if target_cell_count is None else target_cell_count
    if target < 1:
        raise ValidationError(f"Target cell count must be >= 1, got {target}")

    best = state.live_count
    idle = 0
    steps = 0
    while state.live_count < target:
        if steps >= cfg.max_steps or idle >= cfg.stall_patience:
            if os.getenv("NANOCTL_VERBOSE"):
                console.print(
                    f"[yellow]Tumour growth stalled at {state.live_count} cells "
                    f"after {state.step_count} steps[/yellow]"
                )
            return GrowthResult(snapshot=state.snapshot(), stalled=True, steps=steps)
        step(state)
        steps += 1
        if state.live_count > best:
            best = state.live_count
            idle = 0
        else:
            idle += 1
    return GrowthResult(snapshot=state.snapshot(), stalled=False, steps=steps)
