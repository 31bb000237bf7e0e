"""
Sample command - scenario extraction from a tumour snapshot
"""

from pathlib import Path
from typing import Optional

import pandas as pd
from rich.console import Console
from rich.table import Table

from ...core.config import PipelineConfig
from ...core.exceptions import ScenarioError
from ...core.scenario import (
    DEFAULT_DEPTH_CELLS,
    depth_stats,
    extract_scenarios,
    penetration_profile,
    scenario_counts,
    worst_case_heterogeneous,
    worst_case_homogeneous,
    write_scenarios,
)
from ...core.seeding import resolve_seed
from ...core.tumour import read_snapshot

console = Console()

WORST_CASES = {"homo": worst_case_homogeneous, "hetero": worst_case_heterogeneous}


def _parse_depth(depth: Optional[str], default: Optional[int]) -> Optional[int]:
    """None means derive the depth from the snapshot"""
    if depth is None:
        return default
    if depth == "auto":
        return None
    try:
        value = int(depth)
    except ValueError:
        raise ScenarioError(f"--depth must be an integer or 'auto', got {depth!r}")
    if value < 1:
        raise ScenarioError(f"--depth must be >= 1, got {value}")
    return value


def run(
    snapshot_file: Optional[str] = None,
    n: Optional[int] = None,
    depth: Optional[str] = None,
    worst_case: Optional[str] = None,
    config_file: Optional[str] = None,
    seed: Optional[int] = None,
    out: Optional[str] = None,
) -> Path:
    """Write a scenario file (and a penetration profile when sampling a snapshot)"""
    config = PipelineConfig.load_or_default(Path(config_file) if config_file else None)
    out_dir = Path(out or config.output_dir)
    scenario_path = out_dir / "scenarios.txt"
    depth_cells = _parse_depth(depth, config.scenario.depth_cells)

    if worst_case is not None:
        if worst_case not in WORST_CASES:
            raise ScenarioError(f"--worst-case must be one of {sorted(WORST_CASES)}")
        scenario = WORST_CASES[worst_case](depth_cells or DEFAULT_DEPTH_CELLS)
        write_scenarios([scenario], scenario_path)
        console.print(f"[green]✓ Scenario '{scenario.id}' written to {scenario_path}[/green]")
        return scenario_path

    if snapshot_file is None:
        raise ScenarioError("A snapshot file is required unless --worst-case is given")

    requested = seed if seed is not None else config.seed
    effective = resolve_seed(requested)
    if requested is None:
        console.print(f"[dim]No seed given, using seed {effective}[/dim]")

    snapshot = read_snapshot(Path(snapshot_file))
    stats = depth_stats(snapshot)
    if depth_cells is None:
        depth_cells = stats.depth_cells
    console.print(f"95th percentile cell-to-vessel distance: [bold]{stats.p95:.1f} μm[/bold]")
    console.print(f"Scenario depth: [bold]{depth_cells}[/bold] compartments")

    count = config.scenario.n if n is None else n
    scenarios = extract_scenarios(snapshot, count, depth_cells, rng_seed=effective)
    write_scenarios(scenarios, scenario_path)

    profile = pd.DataFrame(
        penetration_profile(stats.distances), columns=["distance_um", "cells", "cumulative"]
    )
    profile.to_csv(out_dir / "penetration_profile.csv", index=False)

    totals = scenario_counts(scenarios)
    table = Table(show_header=True, header_style="bold cyan")
    table.add_column("Compartment", style="white")
    table.add_column("Total", justify="right")
    for kind, total in totals.items():
        table.add_row(kind.name, f"{total:,}")
    console.print(table)
    console.print(f"[green]✓ {len(scenarios)} scenarios written to {scenario_path}[/green]")
    return scenario_path
