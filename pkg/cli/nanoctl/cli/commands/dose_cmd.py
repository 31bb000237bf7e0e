"""
Dose command - dosimetry report for nanoparticle designs
"""

from pathlib import Path
from typing import List, Optional, Sequence

from rich.console import Console
from rich.table import Table

from ...core.config import PipelineConfig
from ...core.dosimetry import (
    DEFAULT_DISSOC_RATE,
    DEFAULT_INTERNAL_RATE,
    NanoparticleDesign,
    design_summary,
    reference_designs,
)
from ...core.exceptions import ValidationError

console = Console()


def parse_design(
    text: str,
    dissoc_rate: float = DEFAULT_DISSOC_RATE,
    internal_rate: float = DEFAULT_INTERNAL_RATE,
) -> NanoparticleDesign:
    """Parse ``D,ka,NP0,E`` into a design"""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise ValidationError(f"Design must be D,ka,NP0,E; got {text!r}")
    try:
        d, ka, np0, e = (float(p) for p in parts)
        return NanoparticleDesign(
            diffusion=d,
            binding_rate=ka,
            dissoc_rate=dissoc_rate,
            internal_rate=internal_rate,
            extravasated_count=np0,
            payload_count=e,
        )
    except ValueError as err:
        raise ValidationError(f"Invalid design {text!r}: {err}")


def resolve_designs(
    preset: Optional[str],
    specs: Optional[Sequence[str]],
    dissoc_rate: float = DEFAULT_DISSOC_RATE,
    internal_rate: float = DEFAULT_INTERNAL_RATE,
) -> List[NanoparticleDesign]:
    """Designs from a named preset or from one/two ``--design`` options"""
    if preset and specs:
        raise ValidationError("Use either --preset or --design, not both")
    if preset:
        presets = reference_designs()
        if preset not in presets:
            raise ValidationError(f"Unknown preset {preset!r}; choose from {sorted(presets)}")
        return presets[preset]
    if not specs:
        raise ValidationError("Give a --preset or at least one --design D,ka,NP0,E")
    if len(specs) > 2:
        raise ValidationError("At most two designs (NP1, NP2) are supported")
    return [parse_design(s, dissoc_rate, internal_rate) for s in specs]


def run(
    preset: Optional[str] = None,
    designs: Optional[List[str]] = None,
    pid: Optional[float] = None,
    config_file: Optional[str] = None,
) -> None:
    """Print dose, radius, K_D, NP_max and the toxicity check per design"""
    config = PipelineConfig.load_or_default(Path(config_file) if config_file else None)
    host = config.host
    if pid is not None:
        if not 0 < pid <= 1:
            raise ValidationError(f"--pid must lie in (0, 1], got {pid}")
        host = host.model_copy(update={"pid_fraction": pid})

    table = Table(show_header=True, header_style="bold cyan", title="Design Summary")
    table.add_column("Species", style="white")
    table.add_column("Dose (mg/kg)", justify="right")
    table.add_column("Radius (nm)", justify="right")
    table.add_column("K_D (nM)", justify="right")
    table.add_column("NP_max", justify="right")
    table.add_column("Toxicity", justify="center")

    cap = config.evolve.dose_cap
    outside = []
    for index, design in enumerate(resolve_designs(preset, designs), start=1):
        if not design.within_search_range():
            outside.append(f"NP{index}")
        summary = design_summary(design, config.drug, host, config.geometry, cap)
        status = f"[red]✗ > {cap:g}[/red]" if summary.toxic else "[green]✓ OK[/green]"
        table.add_row(
            f"NP{index}",
            f"{summary.dose_mg_kg:.3g}",
            f"{summary.radius_nm:.3g}",
            f"{summary.kd_nm:.3g}",
            f"{summary.lethal_threshold:,}",
            status,
        )

    console.print(table)
    console.print(f"[dim]PID fraction: {host.pid_fraction:g}[/dim]")
    for name in outside:
        console.print(f"[yellow]⚠️  {name} lies outside the search range[/yellow]")
