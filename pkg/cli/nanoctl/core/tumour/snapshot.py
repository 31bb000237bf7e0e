"""
Tumour snapshots and their text file format

Snapshot file::

    step=<n> dims=<x>,<y>,<z>
    <id>,<kind>,<x>,<y>,<z>,<dormant>
    ...

``kind`` is one of CC, CSC, VP, NEC and ``dormant`` is 0 or 1. Agents are
written in ascending id order. The optional oxygen sidecar holds one line per
(x, y) pair with the z-column of values, i.e. the field in C (row-major) order.
"""

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, Iterator, Optional, Tuple

import numpy as np

from ..exceptions import SnapshotFormatError, ValidationError


class AgentType(str, Enum):
    """Agent kinds on the tumour lattice"""

    CC = "CC"
    CSC = "CSC"
    VP = "VP"
    NECROTIC = "NEC"


# lattice codes; 0 marks an empty voxel
EMPTY = 0
KIND_CODES: Dict[AgentType, int] = {
    AgentType.CC: 1,
    AgentType.CSC: 2,
    AgentType.VP: 3,
    AgentType.NECROTIC: 4,
}
CODE_KINDS: Dict[int, AgentType] = {code: kind for kind, code in KIND_CODES.items()}


@dataclass(frozen=True)
class Agent:
    """One agent of a snapshot"""

    id: int
    kind: AgentType
    pos: Tuple[int, int, int]
    dormant: bool = False


@dataclass(frozen=True)
class TumourSnapshot:
    """Immutable view of the tumour at one step"""

    step: int
    dims: Tuple[int, int, int]
    ids: np.ndarray
    kinds: np.ndarray
    positions: np.ndarray
    dormant: np.ndarray
    oxygen: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        for array in (self.ids, self.kinds, self.positions, self.dormant, self.oxygen):
            if array is not None:
                array.setflags(write=False)

    @classmethod
    def from_agents(
        cls,
        agents: Iterable[Agent],
        dims: Tuple[int, int, int],
        step: int = 0,
        oxygen: Optional[np.ndarray] = None,
    ) -> "TumourSnapshot":
        """Build a snapshot from agent records, checking voxel exclusivity"""
        rows = sorted(agents, key=lambda a: a.id)
        ids = np.array([a.id for a in rows], dtype=np.int64)
        kinds = np.array([KIND_CODES[AgentType(a.kind)] for a in rows], dtype=np.int8)
        positions = np.array([a.pos for a in rows], dtype=np.int64).reshape(-1, 3)
        dormant = np.array([a.dormant for a in rows], dtype=bool)

        if len(np.unique(ids)) != len(ids):
            raise ValidationError("Duplicate agent ids in snapshot")
        if len(positions):
            if (positions < 0).any() or (positions >= np.array(dims)).any():
                raise ValidationError("Agent outside the lattice")
            if len(np.unique(positions, axis=0)) != len(positions):
                raise ValidationError("Two agents share a voxel")

        return cls(
            step=step,
            dims=tuple(int(d) for d in dims),  # type: ignore[arg-type]
            ids=ids,
            kinds=kinds,
            positions=positions,
            dormant=dormant,
            oxygen=None if oxygen is None else np.array(oxygen, dtype=np.float64),
        )

    def __len__(self) -> int:
        return len(self.ids)

    def agents(self) -> Iterator[Agent]:
        for agent_id, code, pos, dormant in zip(self.ids, self.kinds, self.positions, self.dormant):
            yield Agent(
                id=int(agent_id),
                kind=CODE_KINDS[int(code)],
                pos=(int(pos[0]), int(pos[1]), int(pos[2])),
                dormant=bool(dormant),
            )

    def positions_of(self, *kinds: AgentType) -> np.ndarray:
        """Positions of every agent whose kind is in ``kinds``"""
        codes = [KIND_CODES[k] for k in kinds]
        return self.positions[np.isin(self.kinds, codes)]

    def kind_grid(self) -> np.ndarray:
        """Dense lattice of kind codes (0 = empty)"""
        grid = np.zeros(self.dims, dtype=np.int8)
        if len(self.positions):
            grid[self.positions[:, 0], self.positions[:, 1], self.positions[:, 2]] = self.kinds
        return grid


def type_counts(snapshot: TumourSnapshot) -> Dict[AgentType, int]:
    """Exact tally of agents per type"""
    codes, counts = np.unique(snapshot.kinds, return_counts=True)
    tally = {kind: 0 for kind in AgentType}
    for code, count in zip(codes, counts):
        tally[CODE_KINDS[int(code)]] = int(count)
    return tally


def csc_fraction(snapshot: TumourSnapshot) -> float:
    """CSC share of live cancer cells (CC + CSC)"""
    counts = type_counts(snapshot)
    live = counts[AgentType.CC] + counts[AgentType.CSC]
    return counts[AgentType.CSC] / live if live else 0.0


def write_snapshot(
    snapshot: TumourSnapshot, path: Path, oxygen_path: Optional[Path] = None
) -> None:
    """Write the snapshot file and, optionally, the oxygen sidecar"""
    path.parent.mkdir(parents=True, exist_ok=True)
    x, y, z = snapshot.dims
    with open(path, "w") as f:
        f.write(f"step={snapshot.step} dims={x},{y},{z}\n")
        for agent in snapshot.agents():
            px, py, pz = agent.pos
            f.write(f"{agent.id},{agent.kind.value},{px},{py},{pz},{int(agent.dormant)}\n")

    if oxygen_path is not None and snapshot.oxygen is not None:
        rows = snapshot.oxygen.reshape(-1, snapshot.dims[2])
        np.savetxt(oxygen_path, rows, fmt="%.10g")


def _parse_header(line: str) -> Tuple[int, Tuple[int, int, int]]:
    fields = dict(part.split("=", 1) for part in line.split())
    step = int(fields["step"])
    dims = tuple(int(v) for v in fields["dims"].split(","))
    if len(dims) != 3 or min(dims) < 1:
        raise ValueError("dims must be three positive integers")
    return step, dims  # type: ignore[return-value]


def read_snapshot(path: Path, oxygen_path: Optional[Path] = None) -> TumourSnapshot:
    """Parse a snapshot file, reporting the offending line on malformed input"""
    if not path.exists():
        raise SnapshotFormatError(f"Snapshot file not found: {path}")

    with open(path, "r") as f:
        lines = f.read().splitlines()
    if not lines:
        raise SnapshotFormatError("Empty snapshot file", line=1)

    try:
        step, dims = _parse_header(lines[0])
    except (KeyError, ValueError) as e:
        raise SnapshotFormatError(f"Malformed header: {e}", line=1)

    agents = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 6:
            raise SnapshotFormatError(f"Expected 6 fields, got {len(parts)}", line=lineno)
        try:
            agent_id, kind, px, py, pz, dormant = parts
            if dormant not in ("0", "1"):
                raise ValueError(f"dormant must be 0 or 1, got {dormant!r}")
            agents.append(
                Agent(
                    id=int(agent_id),
                    kind=AgentType(kind),
                    pos=(int(px), int(py), int(pz)),
                    dormant=dormant == "1",
                )
            )
        except ValueError as e:
            raise SnapshotFormatError(f"Malformed agent record: {e}", line=lineno)

    oxygen = None
    if oxygen_path is not None:
        try:
            oxygen = np.loadtxt(oxygen_path, dtype=np.float64, ndmin=2).reshape(dims)
        except ValueError as e:
            raise SnapshotFormatError(f"Malformed oxygen sidecar {oxygen_path}: {e}")

    try:
        return TumourSnapshot.from_agents(agents, dims, step=step, oxygen=oxygen)
    except ValidationError as e:
        raise SnapshotFormatError(f"Inconsistent snapshot: {e.message}")
