"""
Gene space of the nanoparticle optimisation

Each species contributes four genes: diffusion D, binding rate k_a,
extravasated count NP0 and payload E. All four are searched on a log scale.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..dosimetry import (
    BINDING_RATE_RANGE,
    DEFAULT_DISSOC_RATE,
    DEFAULT_INTERNAL_RATE,
    DIFFUSION_RANGE,
    EXTRAVASATED_RANGE,
    PAYLOAD_RANGE,
    NanoparticleDesign,
)
from ..exceptions import ValidationError

GENES_PER_SPECIES = 4
_BASE_GENES = (
    ("D", DIFFUSION_RANGE),
    ("ka", BINDING_RATE_RANGE),
    ("NP0", EXTRAVASATED_RANGE),
    ("E", PAYLOAD_RANGE),
)


class GeneScale(str, Enum):
    LOG = "log"
    LINEAR = "linear"


class Gene(BaseModel):
    """One bounded gene"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    lower: float
    upper: float
    scale: GeneScale = GeneScale.LOG

    @model_validator(mode="after")
    def check_range(self) -> "Gene":
        if not self.lower < self.upper:
            raise ValueError(f"{self.name}: lower bound must be below upper bound")
        if self.scale == GeneScale.LOG and self.lower <= 0:
            raise ValueError(f"{self.name}: log-scale genes need a positive lower bound")
        return self


class GeneBounds(BaseModel):
    """Ordered gene set; its length is a multiple of four (one block per species)"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    genes: Tuple[Gene, ...]
    dissoc_rate: float = Field(default=DEFAULT_DISSOC_RATE, gt=0)
    internal_rate: float = Field(default=DEFAULT_INTERNAL_RATE, gt=0)

    @model_validator(mode="after")
    def check_blocks(self) -> "GeneBounds":
        if not self.genes or len(self.genes) % GENES_PER_SPECIES:
            raise ValueError("Gene count must be a positive multiple of 4")
        if len(self.genes) // GENES_PER_SPECIES > 2:
            raise ValueError("At most two nanoparticle species are supported")
        return self

    def __len__(self) -> int:
        return len(self.genes)

    @property
    def n_species(self) -> int:
        return len(self.genes) // GENES_PER_SPECIES

    @property
    def names(self) -> List[str]:
        return [g.name for g in self.genes]

    @property
    def lower(self) -> np.ndarray:
        return np.array([g.lower for g in self.genes])

    @property
    def upper(self) -> np.ndarray:
        return np.array([g.upper for g in self.genes])

    def clamp(self, genes: np.ndarray) -> np.ndarray:
        return np.clip(genes, self.lower, self.upper)

    def contains(self, genes: np.ndarray) -> bool:
        genes = np.asarray(genes, dtype=np.float64)
        return genes.shape == (len(self),) and bool(
            ((genes >= self.lower) & (genes <= self.upper)).all()
        )

    def to_designs(self, genes: Sequence[float]) -> List[NanoparticleDesign]:
        """Split a gene vector into one NanoparticleDesign per species"""
        if len(genes) != len(self):
            raise ValidationError(f"Expected {len(self)} genes, got {len(genes)}")
        designs = []
        for s in range(self.n_species):
            d, ka, np0, e = (float(v) for v in genes[s * 4 : s * 4 + 4])
            designs.append(
                NanoparticleDesign(
                    diffusion=d,
                    binding_rate=ka,
                    dissoc_rate=self.dissoc_rate,
                    internal_rate=self.internal_rate,
                    extravasated_count=np0,
                    payload_count=e,
                )
            )
        return designs


def species_bounds(n_species: int) -> GeneBounds:
    """Default search box: the optimisation ranges, duplicated per species"""
    if n_species not in (1, 2):
        raise ValidationError(f"n_species must be 1 or 2, got {n_species}")
    genes = []
    for s in range(n_species):
        suffix = "" if n_species == 1 else f"_{s + 1}"
        for name, (lo, hi) in _BASE_GENES:
            genes.append(Gene(name=f"{name}{suffix}", lower=lo, upper=hi))
    return GeneBounds(genes=tuple(genes))


def homogeneous_bounds() -> GeneBounds:
    return species_bounds(1)


def heterogeneous_bounds() -> GeneBounds:
    return species_bounds(2)


@dataclass
class Individual:
    """Gene vector with its (possibly pending) fitness"""

    genes: np.ndarray
    fitness: Optional[float] = None
    eval_metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def evaluated(self) -> bool:
        return self.fitness is not None and not math.isnan(self.fitness)

    def copy(self) -> "Individual":
        return Individual(
            genes=self.genes.copy(), fitness=self.fitness, eval_metadata=dict(self.eval_metadata)
        )
