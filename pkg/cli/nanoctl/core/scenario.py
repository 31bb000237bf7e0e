"""
Tissue scenarios extracted from tumour snapshots

A scenario is a 1-D chain of cubic compartments starting at a vessel point.
Scenario file format, one scenario per line::

    <id> V C C S E ...

with V=VP, C=CC, S=CSC, E=ECM.
"""

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.spatial import cKDTree

from .exceptions import ScenarioError
from .tumour.snapshot import KIND_CODES, AgentType, TumourSnapshot

VOXEL_UM = 10.0
DEFAULT_DEPTH_CELLS = 22
HETEROGENEOUS_CSC_POSITIONS = (14, 18)


class CompartmentKind(str, Enum):
    """Compartment labels of a scenario chain"""

    VP = "V"
    CC = "C"
    CSC = "S"
    ECM = "E"


_LABEL_FROM_CODE = {
    KIND_CODES[AgentType.CC]: CompartmentKind.CC,
    KIND_CODES[AgentType.CSC]: CompartmentKind.CSC,
    KIND_CODES[AgentType.VP]: CompartmentKind.VP,
}

_AXES = np.array(
    [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)], dtype=np.int64
)


class Scenario(BaseModel):
    """Ordered compartment chain; index 0 is the releasing vessel point"""

    model_config = ConfigDict(frozen=True)

    id: str = Field(..., min_length=1)
    compartments: Tuple[CompartmentKind, ...]
    length_per_compartment: float = Field(default=VOXEL_UM * 1e-6, gt=0, description="m")

    @field_validator("compartments")
    @classmethod
    def validate_chain(cls, v: Tuple[CompartmentKind, ...]) -> Tuple[CompartmentKind, ...]:
        if len(v) < 2:
            raise ValueError("A scenario needs at least 2 compartments")
        if v[0] != CompartmentKind.VP:
            raise ValueError("Compartment 0 must be a vessel point")
        return v

    def count(self, kind: CompartmentKind) -> int:
        return sum(1 for c in self.compartments if c == kind)

    @property
    def tokens(self) -> str:
        return " ".join(c.value for c in self.compartments)


@dataclass(frozen=True)
class DepthStats:
    """Distances of cancer cells to their nearest vessel point"""

    distances: np.ndarray
    p95: float
    depth_cells: int


def nearest_rank(values: Sequence[float], percent: int = 95) -> float:
    """Nearest-rank percentile: the ceil(percent/100 * n)-th order statistic"""
    ordered = np.sort(np.asarray(values, dtype=np.float64))
    if not len(ordered):
        raise ScenarioError("Percentile of an empty sample")
    rank = max(1, (percent * len(ordered) + 99) // 100)
    return float(ordered[rank - 1])


def depth_stats(snapshot: TumourSnapshot, voxel_um: float = VOXEL_UM) -> DepthStats:
    """Minimum distance of every CC/CSC to any VP, its 95th percentile and depth in cells"""
    vessels = snapshot.positions_of(AgentType.VP)
    cells = snapshot.positions_of(AgentType.CC, AgentType.CSC)
    if not len(vessels):
        raise ScenarioError("Snapshot contains no vessel points")
    if not len(cells):
        raise ScenarioError("Snapshot contains no cancer cells")

    distances, _ = cKDTree(vessels).query(cells, k=1)
    distances = np.asarray(distances, dtype=np.float64) * voxel_um
    p95 = nearest_rank(distances, 95)
    depth = max(1, math.ceil(p95 / voxel_um - 1e-9))
    return DepthStats(distances=distances, p95=p95, depth_cells=depth)


def penetration_profile(
    distances: np.ndarray, bin_um: float = VOXEL_UM
) -> List[Tuple[float, int, float]]:
    """(bin upper edge in um, cells in bin, cumulative fraction) rows for plotting"""
    if not len(distances):
        return []
    n_bins = max(1, math.ceil(float(np.max(distances)) / bin_um - 1e-9))
    edges = np.arange(n_bins + 1) * bin_um
    counts, _ = np.histogram(distances, bins=edges)
    cumulative = np.cumsum(counts) / len(distances)
    return [(float(edges[i + 1]), int(counts[i]), float(cumulative[i])) for i in range(n_bins)]


def extract_scenarios(
    snapshot: TumourSnapshot,
    n: int,
    depth_cells: int = DEFAULT_DEPTH_CELLS,
    rng_seed: int = 0,
) -> List[Scenario]:
    """
    Sample ``n`` axis-aligned rays of ``depth_cells`` voxels from random vessel
    points. Empty, necrotic or out-of-lattice voxels become ECM.
    """
    if n < 0 or depth_cells < 1:
        raise ScenarioError(f"Invalid extraction request: n={n}, depth_cells={depth_cells}")
    vessels = snapshot.positions_of(AgentType.VP)
    if not len(vessels):
        raise ScenarioError("Snapshot contains no vessel points")

    grid = snapshot.kind_grid()
    dims = np.asarray(snapshot.dims)
    rng = np.random.default_rng(rng_seed)
    steps = np.arange(1, depth_cells + 1)[:, None]

    scenarios = []
    for index in range(n):
        origin = vessels[int(rng.integers(len(vessels)))]
        axis = _AXES[int(rng.integers(len(_AXES)))]
        ray = origin + steps * axis
        labels = [CompartmentKind.VP]
        for voxel in ray:
            if (voxel < 0).any() or (voxel >= dims).any():
                labels.append(CompartmentKind.ECM)
                continue
            code = int(grid[voxel[0], voxel[1], voxel[2]])
            labels.append(_LABEL_FROM_CODE.get(code, CompartmentKind.ECM))
        scenarios.append(Scenario(id=f"s{index:03d}", compartments=tuple(labels)))
    return scenarios


def worst_case_homogeneous(depth_cells: int = DEFAULT_DEPTH_CELLS) -> Scenario:
    """One VP followed by cancer cells only"""
    return Scenario(
        id="worst-homogeneous",
        compartments=(CompartmentKind.VP,) + (CompartmentKind.CC,) * depth_cells,
    )


def worst_case_heterogeneous(depth_cells: int = DEFAULT_DEPTH_CELLS) -> Scenario:
    """One VP, cancer cells, and CSCs 140 um and 180 um from the vessel"""
    compartments = [CompartmentKind.VP] + [CompartmentKind.CC] * depth_cells
    for position in HETEROGENEOUS_CSC_POSITIONS:
        if position <= depth_cells:
            compartments[position] = CompartmentKind.CSC
    return Scenario(id="worst-heterogeneous", compartments=tuple(compartments))


def scenario_counts(scenarios: Sequence[Scenario]) -> Dict[CompartmentKind, int]:
    """Compartment totals per kind across a scenario set"""
    totals = {kind: 0 for kind in CompartmentKind}
    for scenario in scenarios:
        for kind in scenario.compartments:
            totals[kind] += 1
    return totals


def write_scenarios(scenarios: Sequence[Scenario], path: Path) -> None:
    """Write scenarios in the one-line-per-scenario token format"""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        for scenario in scenarios:
            f.write(f"{scenario.id} {scenario.tokens}\n")


def read_scenarios(path: Path) -> List[Scenario]:
    """Parse a scenario file, reporting the offending line on malformed input"""
    if not path.exists():
        raise ScenarioError(f"Scenario file not found: {path}")

    scenarios = []
    with open(path, "r") as f:
        for lineno, line in enumerate(f, start=1):
            parts = line.split()
            if not parts:
                continue
            try:
                kinds = tuple(CompartmentKind(token) for token in parts[1:])
                scenarios.append(Scenario(id=parts[0], compartments=kinds))
            except ValueError as e:
                raise ScenarioError(
                    f"Malformed scenario on line {lineno}: {e}", {"line": lineno, "path": str(path)}
                )
    return scenarios
