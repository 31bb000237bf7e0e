"""
Closed-form nanoparticle and treatment arithmetic

Converts between injected dose and the number of particles extravasating into a
scenario column, derives the per-cell lethal threshold from the payload's IC90,
and reports the size/affinity quantities used in solution summaries.

All public quantities carry their unit in the field name; computation happens
in SI units plus mol.
"""

import math
from typing import Dict, List

from pydantic import BaseModel, ConfigDict, Field

from .exceptions import ValidationError

AVOGADRO = 6.02214076e23  # 1/mol

# Stokes-Einstein calibrated so that D = 1e-6 cm^2/s <-> r = 2.5 nm
STOKES_EINSTEIN_NM_CM2_S = 2.5e-6

# Search ranges of the evolvable parameters
DIFFUSION_RANGE = (1e-8, 1e-6)
BINDING_RATE_RANGE = (1e3, 1e6)
EXTRAVASATED_RANGE = (1e4, 1e6)
PAYLOAD_RANGE = (1e2, 1e4)

DEFAULT_DISSOC_RATE = 1e-4
DEFAULT_INTERNAL_RATE = 1e-5
TOXIC_DOSE_MG_KG = 55.0


class DrugModel(BaseModel):
    """Payload drug properties (doxorubicin by default)"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(default="doxorubicin", description="Payload drug name")
    molar_mass: float = Field(default=543.52, gt=0, description="Molar mass, g/mol")
    potency_ic90: float = Field(default=10e-6, gt=0, description="IC90 potency, mol/L")


class HostModel(BaseModel):
    """Murine host and tumour properties"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    weight: float = Field(default=20.0, gt=0, description="Body mass, g")
    pid_fraction: float = Field(
        default=0.01, gt=0, le=1, description="Fraction of injected dose reaching the tumour"
    )
    tumour_volume: float = Field(default=125.0, gt=0, description="Tumour volume, mm^3")
    circulation_time: float = Field(
        default=48 * 3600.0, gt=0, description="Circulation window at which PID is measured, s"
    )
    cell_length: float = Field(default=10e-6, gt=0, description="Cell length scale S, m")
    receptors_per_cell: int = Field(default=100_000, gt=0, description="Receptors per cell N_R")


class PenetrationGeometry(BaseModel):
    """Depth of the tissue column that extravasated particles must cover"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    compartment_length: float = Field(default=10e-6, gt=0, description="Compartment edge, m")
    n_cells: int = Field(default=22, ge=1, description="Penetration depth in cells")

    @property
    def total_depth(self) -> float:
        """Required penetration depth L, m"""
        return self.n_cells * self.compartment_length


class NanoparticleDesign(BaseModel):
    """Evolvable parameters of one nanoparticle species plus its fixed kinetics"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    diffusion: float = Field(..., gt=0, description="Diffusion coefficient D, cm^2/s")
    binding_rate: float = Field(..., ge=0, description="Binding rate k_a, 1/(M s)")
    dissoc_rate: float = Field(default=DEFAULT_DISSOC_RATE, gt=0, description="k_d, 1/s")
    internal_rate: float = Field(default=DEFAULT_INTERNAL_RATE, gt=0, description="k_i, 1/s")
    extravasated_count: float = Field(
        ..., ge=0, description="Particles entering the scenario column over circulation, NP0"
    )
    payload_count: float = Field(..., gt=0, description="Drug molecules per particle, E")

    def within_search_range(self) -> bool:
        """Whether the evolvable parameters lie inside the optimisation ranges"""
        checks = [
            (self.diffusion, DIFFUSION_RANGE),
            (self.binding_rate, BINDING_RATE_RANGE),
            (self.extravasated_count, EXTRAVASATED_RANGE),
            (self.payload_count, PAYLOAD_RANGE),
        ]
        return all(lo <= value <= hi for value, (lo, hi) in checks)


class DesignSummary(BaseModel):
    """Derived quantities reported for a design"""

    dose_mg_kg: float
    radius_nm: float
    kd_nm: float
    lethal_threshold: int
    toxic: bool


def _require_positive(**values: float) -> None:
    bad = [{"path": k, "message": f"must be > 0, got {v}"} for k, v in values.items() if v <= 0]
    if bad:
        raise ValidationError("Non-positive dosimetry input", bad)


def check_cell_length(cell_length: float, compartment_length: float, source: str) -> None:
    """Raise when a compartment edge differs from the cell length S"""
    if not math.isclose(cell_length, compartment_length, rel_tol=1e-9):
        raise ValidationError(
            "Cell length mismatch",
            [
                {
                    "path": source,
                    "message": f"{compartment_length:g} m differs from "
                    f"host.cell_length {cell_length:g} m",
                }
            ],
        )


def injected_dose(
    design: NanoparticleDesign,
    drug: DrugModel,
    host: HostModel,
    geom: PenetrationGeometry,
) -> float:
    """
    Injected dose (mg drug per kg body mass) that delivers ``NP0`` particles
    into the scenario column.

    ID = NP0 * E * M * V_t / (W * PID * S^2 * L * N_A)
    """
    if design.extravasated_count < 0:
        raise ValidationError("Extravasated count must be >= 0")
    check_cell_length(host.cell_length, geom.compartment_length, "geometry.compartment_length")
    tumour_volume_m3 = host.tumour_volume * 1e-9
    weight_kg = host.weight * 1e-3
    grams_per_kg = (
        design.extravasated_count
        * design.payload_count
        * drug.molar_mass
        * tumour_volume_m3
        / (
            weight_kg
            * host.pid_fraction
            * host.cell_length**2
            * geom.total_depth
            * AVOGADRO
        )
    )
    return grams_per_kg * 1e3


def extravasated_count(
    dose_mg_kg: float,
    payload_count: float,
    drug: DrugModel,
    host: HostModel,
    geom: PenetrationGeometry,
) -> float:
    """Particles entering the scenario column for an injected dose (inverse of injected_dose)"""
    if dose_mg_kg < 0:
        raise ValidationError(f"Injected dose must be >= 0, got {dose_mg_kg}")
    _require_positive(payload_count=payload_count)
    check_cell_length(host.cell_length, geom.compartment_length, "geometry.compartment_length")
    tumour_volume_m3 = host.tumour_volume * 1e-9
    weight_kg = host.weight * 1e-3
    grams_per_kg = dose_mg_kg * 1e-3
    return (
        grams_per_kg
        * weight_kg
        * host.pid_fraction
        * host.cell_length**2
        * geom.total_depth
        * AVOGADRO
        / (payload_count * drug.molar_mass * tumour_volume_m3)
    )


def lethal_threshold(payload_count: float, drug: DrugModel, cell_length: float) -> int:
    """
    Internalised particles that deliver the IC90 payload to one cell volume.

    NP_max = ceil(P * S^3 * N_A / E); rounds up so a cell never dies below IC90.
    """
    _require_positive(payload_count=payload_count, cell_length=cell_length)
    cell_volume_l = (cell_length**3) * 1e3
    exact = drug.potency_ic90 * cell_volume_l * AVOGADRO / payload_count
    # guard against ceil() pushing exact integers up through rounding noise
    return max(1, math.ceil(exact * (1.0 - 1e-12)))


def radius_from_diffusion(diffusion: float) -> float:
    """Hydrodynamic radius (nm) from the diffusion coefficient (cm^2/s)"""
    _require_positive(diffusion=diffusion)
    return STOKES_EINSTEIN_NM_CM2_S / diffusion


def dissociation_constant(binding_rate: float, dissoc_rate: float) -> float:
    """Equilibrium dissociation constant K_D = k_d / k_a, in nM"""
    _require_positive(binding_rate=binding_rate)
    return dissoc_rate / binding_rate * 1e9


def design_summary(
    design: NanoparticleDesign,
    drug: DrugModel,
    host: HostModel,
    geom: PenetrationGeometry,
    dose_cap: float = TOXIC_DOSE_MG_KG,
) -> DesignSummary:
    """Dose, radius, K_D, lethal threshold and toxicity flag for one design"""
    dose = injected_dose(design, drug, host, geom)
    kd = (
        dissociation_constant(design.binding_rate, design.dissoc_rate)
        if design.binding_rate > 0
        else math.inf
    )
    return DesignSummary(
        dose_mg_kg=dose,
        radius_nm=radius_from_diffusion(design.diffusion),
        kd_nm=kd,
        lethal_threshold=lethal_threshold(design.payload_count, drug, host.cell_length),
        toxic=dose > dose_cap,
    )


def reference_designs() -> Dict[str, List[NanoparticleDesign]]:
    """Reference optimum designs, keyed by tumour setting"""
    return {
        "homogeneous": [
            NanoparticleDesign(
                diffusion=1e-6, binding_rate=7e5, extravasated_count=60_000, payload_count=5_000
            ),
        ],
        "heterogeneous-1": [
            NanoparticleDesign(
                diffusion=9.8e-7, binding_rate=2.17e5, extravasated_count=923_000, payload_count=400
            ),
            NanoparticleDesign(
                diffusion=6.4e-7,
                binding_rate=1.17e5,
                extravasated_count=150_000,
                payload_count=2_500,
            ),
        ],
        "heterogeneous-2": [
            NanoparticleDesign(
                diffusion=9.7e-9,
                binding_rate=8.3e3,
                extravasated_count=236_000,
                payload_count=7_600,
            ),
            NanoparticleDesign(
                diffusion=5.7e-7,
                binding_rate=7.91e5,
                extravasated_count=828_000,
                payload_count=1_200,
            ),
        ],
    }
