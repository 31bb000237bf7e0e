"""
Simulate command - single tissue simulations of fixed designs
"""

from pathlib import Path
from typing import List, Optional

import pandas as pd
from rich.console import Console
from rich.progress import Progress
from rich.table import Table

from ...core.config import PipelineConfig
from ...core.dosimetry import injected_dose
from ...core.exceptions import ScenarioError
from ...core.scenario import (
    DEFAULT_DEPTH_CELLS,
    read_scenarios,
    worst_case_heterogeneous,
    worst_case_homogeneous,
)
from ...core.seeding import derive_seed, resolve_seed
from ...core.tissue import (
    DEFAULT_SAMPLE_INTERVAL,
    build_system,
    simulate,
    write_profile,
    write_trajectory,
)
from .dose_cmd import resolve_designs

console = Console()


def run(
    scenario_file: Optional[str] = None,
    worst_case: Optional[str] = None,
    preset: Optional[str] = None,
    designs: Optional[List[str]] = None,
    backend: Optional[str] = None,
    seeds: int = 1,
    trajectory: bool = False,
    config_file: Optional[str] = None,
    seed: Optional[int] = None,
    out: Optional[str] = None,
) -> pd.DataFrame:
    """Simulate each scenario ``seeds`` times and report the kill tallies"""
    config = PipelineConfig.load_or_default(Path(config_file) if config_file else None)
    tissue = config.tissue
    backend = backend or tissue.backend
    if seeds < 1:
        raise ScenarioError(f"--seeds must be >= 1, got {seeds}")

    depth = config.scenario.depth_cells or DEFAULT_DEPTH_CELLS
    if worst_case == "homo":
        scenarios = [worst_case_homogeneous(depth)]
    elif worst_case == "hetero":
        scenarios = [worst_case_heterogeneous(depth)]
    elif worst_case is not None:
        raise ScenarioError("--worst-case must be 'homo' or 'hetero'")
    elif scenario_file is not None:
        scenarios = read_scenarios(Path(scenario_file))
    else:
        raise ScenarioError("Give a scenario file or --worst-case homo|hetero")

    nanoparticles = resolve_designs(preset, designs)
    for index, design in enumerate(nanoparticles, start=1):
        dose = injected_dose(design, config.drug, config.host, config.geometry)
        console.print(f"NP{index} injected dose: [bold]{dose:.3g} mg/kg[/bold]")
        if dose > config.evolve.dose_cap:
            console.print(
                f"[yellow]⚠️  NP{index} dose exceeds the {config.evolve.dose_cap:g} mg/kg "
                f"toxicity cap; simulating anyway[/yellow]"
            )

    requested = seed if seed is not None else config.seed
    master = resolve_seed(requested)
    if requested is None:
        console.print(f"[dim]No seed given, using seed {master}[/dim]")

    out_dir = Path(out or config.output_dir)
    interval = (tissue.sample_interval or DEFAULT_SAMPLE_INTERVAL) if trajectory else None
    rows = []
    with Progress(console=console, transient=True) as progress:
        task = progress.add_task("Simulating...", total=len(scenarios) * seeds)
        for s_index, scenario in enumerate(scenarios):
            system = build_system(scenario, nanoparticles, config.drug, config.host, tissue.t_end)
            states = []
            for replicate in range(seeds):
                run_seed = derive_seed(master, s_index, replicate)
                state, outcome = simulate(
                    system,
                    run_seed,
                    backend,
                    tissue.epsilon,
                    interval if replicate == 0 else None,
                )
                states.append(state)
                rows.append(
                    {
                        "scenario": scenario.id,
                        "seed": run_seed,
                        "cc_total": outcome.cc_total,
                        "cc_killed": outcome.cc_killed,
                        "cc_frac": outcome.cc_fraction,
                        "csc_total": outcome.csc_total,
                        "csc_killed": outcome.csc_killed,
                        "csc_frac": outcome.csc_fraction,
                    }
                )
                progress.advance(task)
            if trajectory:
                write_trajectory(states[0], out_dir / f"trajectory_{scenario.id}.csv")
            if seeds > 1:
                write_profile(states, out_dir / f"profile_{scenario.id}.csv")

    frame = pd.DataFrame(rows)
    out_dir.mkdir(parents=True, exist_ok=True)
    frame.to_csv(out_dir / "outcomes.csv", index=False)

    table = Table(show_header=True, header_style="bold cyan", title=f"Outcome ({backend})")
    table.add_column("Scenario", style="white")
    table.add_column("CC killed", justify="right")
    table.add_column("CSC killed", justify="right")
    table.add_column("CC fraction", justify="right")
    table.add_column("CSC fraction", justify="right")
    for scenario_id, group in frame.groupby("scenario", sort=False):
        table.add_row(
            str(scenario_id),
            f"{group['cc_killed'].mean():.1f} / {group['cc_total'].iloc[0]}",
            f"{group['csc_killed'].mean():.1f} / {group['csc_total'].iloc[0]}",
            f"{group['cc_frac'].mean():.3f}",
            f"{group['csc_frac'].mean():.3f}",
        )
    console.print(table)
    console.print(f"[green]✓ Outcomes written to {out_dir / 'outcomes.csv'}[/green]")
    return frame
