"""
Configuration management for nanoctl

A pipeline configuration is one YAML mapping with a section per module. Every
field has a default, so an empty file describes the homogeneous worst-case
optimisation experiment.
"""

import math
from pathlib import Path
from typing import Literal, Optional

import pydantic
import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .dosimetry import DrugModel, HostModel, PenetrationGeometry
from .evolve.runner import EvolveConfig
from .exceptions import ConfigurationError
from .tumour.model import TumourConfig


class ScenarioConfig(BaseModel):
    """Scenario extraction and the scenario pool used by the optimiser"""

    model_config = ConfigDict(extra="forbid")

    n: int = Field(default=100, ge=0, description="Scenarios to extract from a snapshot")
    depth_cells: Optional[int] = Field(
        default=None, ge=1, description="Compartments after the VP; None derives it from p95"
    )
    file: Optional[str] = Field(
        default=None, description="Scenario file for random_k optimisation and evaluation"
    )


class TissueConfig(BaseModel):
    """Tissue simulation backend settings"""

    model_config = ConfigDict(extra="forbid")

    backend: Literal["ssa", "tau"] = Field(default="ssa", description="Simulation backend")
    epsilon: float = Field(default=0.03, gt=0, le=0.1, description="Tau-leaping error control")
    sample_interval: Optional[float] = Field(
        default=None, gt=0, description="Trajectory sampling interval, s; None disables dumps"
    )
    t_end: Optional[float] = Field(
        default=None, gt=0, description="Simulated time, s; None uses the circulation time"
    )


class PipelineConfig(BaseModel):
    """Main configuration of a nanoctl pipeline"""

    model_config = ConfigDict(extra="forbid")

    version: int = Field(default=1, description="Configuration format version")
    seed: Optional[int] = Field(default=None, ge=0, description="Master seed; None draws one")
    output_dir: str = Field(default="results", description="Directory for result bundles")

    tumour: TumourConfig = Field(default_factory=TumourConfig)
    host: HostModel = Field(default_factory=HostModel)
    drug: DrugModel = Field(default_factory=DrugModel)
    geometry: PenetrationGeometry = Field(default_factory=PenetrationGeometry)
    scenario: ScenarioConfig = Field(default_factory=ScenarioConfig)
    tissue: TissueConfig = Field(default_factory=TissueConfig)
    evolve: EvolveConfig = Field(default_factory=EvolveConfig)

    @model_validator(mode="after")
    def check_single_cell_length(self) -> "PipelineConfig":
        if not math.isclose(
            self.geometry.compartment_length, self.host.cell_length, rel_tol=1e-9
        ):
            raise ValueError(
                "geometry.compartment_length must equal host.cell_length "
                f"({self.geometry.compartment_length:g} != {self.host.cell_length:g})"
            )
        return self

    @classmethod
    def load_from_file(cls, config_path: Path) -> "PipelineConfig":
        """Load configuration from YAML file"""
        if not config_path.exists():
            raise ConfigurationError(f"Configuration file not found: {config_path}")

        try:
            with open(config_path, "r") as f:
                data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigurationError(f"Invalid YAML in {config_path}: {e}")

        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigurationError(f"{config_path} must contain a mapping at the top level")

        try:
            return cls(**data)
        except pydantic.ValidationError as e:
            errors = [
                {"path": ".".join(str(p) for p in err["loc"]), "message": err["msg"]}
                for err in e.errors()
            ]
            raise ConfigurationError(
                f"Invalid configuration in {config_path}", {"errors": errors}
            )

    @classmethod
    def load_or_default(cls, config_path: Optional[Path]) -> "PipelineConfig":
        return cls() if config_path is None else cls.load_from_file(config_path)

    def save_to_file(self, config_path: Path) -> None:
        """Save configuration to YAML file"""
        config_path.parent.mkdir(parents=True, exist_ok=True)

        with open(config_path, "w") as f:
            yaml.dump(
                self.model_dump(mode="json"), f, default_flow_style=False, indent=2, sort_keys=False
            )

    def with_overrides(
        self,
        seed: Optional[int] = None,
        output_dir: Optional[Path] = None,
    ) -> "PipelineConfig":
        """Copy with command-line overrides applied"""
        updates = {}
        if seed is not None:
            updates["seed"] = seed
        if output_dir is not None:
            updates["output_dir"] = str(output_dir)
        return self.model_copy(update=updates)
