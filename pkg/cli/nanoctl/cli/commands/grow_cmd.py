"""
Grow command - virtual tumour growth
"""

from pathlib import Path
from typing import Optional

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from ...core.config import PipelineConfig
from ...core.seeding import resolve_seed
from ...core.tumour import AgentType, csc_fraction, grow_until, init, type_counts, write_snapshot

console = Console()


def run(
    config_file: Optional[str] = None,
    seed: Optional[int] = None,
    out: Optional[str] = None,
    target: Optional[int] = None,
) -> Path:
    """Grow a tumour and write its snapshot plus oxygen sidecar"""
    config = PipelineConfig.load_or_default(Path(config_file) if config_file else None)
    requested = next(
        (s for s in (seed, config.seed, config.tumour.seed) if s is not None), None
    )
    effective = resolve_seed(requested)
    if requested is None:
        console.print(f"[dim]No seed given, using seed {effective}[/dim]")

    tumour_config = config.tumour.model_copy(update={"seed": effective})
    goal = target if target is not None else tumour_config.target_cell_count

    console.print(
        Panel.fit(
            f"🧫 [bold blue]Tumour Growth[/bold blue]\n"
            f"Lattice {tumour_config.lattice_dims}, target {goal:,} cells, seed {effective}",
            border_style="blue",
        )
    )

    with console.status("Growing tumour..."):
        state = init(tumour_config)
        result = grow_until(state, goal)

    out_dir = Path(out or config.output_dir)
    snapshot_path = out_dir / "tumour.snap"
    write_snapshot(result.snapshot, snapshot_path, oxygen_path=out_dir / "tumour.o2")

    counts = type_counts(result.snapshot)
    table = Table(show_header=True, header_style="bold cyan")
    table.add_column("Agent", style="white")
    table.add_column("Count", justify="right")
    for kind in AgentType:
        table.add_row(kind.value, f"{counts[kind]:,}")
    console.print(table)
    console.print(f"CSC fraction: [bold]{csc_fraction(result.snapshot):.2%}[/bold]")
    console.print(f"Steps: {result.steps}")

    if result.stalled:
        console.print(
            f"[yellow]⚠️  Growth stalled before reaching {goal:,} cells; "
            f"partial snapshot written[/yellow]"
        )
    console.print(f"[green]✓ Snapshot written to {snapshot_path}[/green]")
    return snapshot_path
