"""
Optimize command - evolutionary search over nanoparticle designs
"""

from pathlib import Path
from typing import Optional

from rich.console import Console
from rich.panel import Panel
from rich.progress import BarColumn, Progress, TextColumn, TimeElapsedColumn
from rich.table import Table

from ...core.config import PipelineConfig
from ...core.evolve import SphereEvaluator, TissueEvaluator, run as run_evolution
from ...core.evolve.genes import species_bounds
from ...core.exceptions import ConfigurationError
from ...core.results import ResultBundle, best_solution_record, write_bundle
from ...core.scenario import (
    DEFAULT_DEPTH_CELLS,
    read_scenarios,
    worst_case_heterogeneous,
    worst_case_homogeneous,
)
from ...core.seeding import resolve_seed

console = Console()


def _scenario_pool(config: PipelineConfig):
    if config.evolve.scenario_mode == "random_k":
        if not config.scenario.file:
            raise ConfigurationError("scenario.file is required for scenario_mode=random_k")
        pool = read_scenarios(Path(config.scenario.file))
        if not pool:
            raise ConfigurationError(f"No scenarios in {config.scenario.file}")
        return pool
    depth = config.scenario.depth_cells or DEFAULT_DEPTH_CELLS
    if config.evolve.n_species == 1:
        return [worst_case_homogeneous(depth)]
    return [worst_case_heterogeneous(depth)]


def run(
    config_file: Optional[str] = None,
    seed: Optional[int] = None,
    jobs: int = 1,
    out: Optional[str] = None,
    mock: bool = False,
    generations: Optional[int] = None,
) -> ResultBundle:
    """Run the optimiser and write a result bundle"""
    config = PipelineConfig.load_or_default(Path(config_file) if config_file else None)
    requested = seed if seed is not None else config.seed
    master = resolve_seed(requested)
    if requested is None:
        console.print(f"[dim]No seed given, using seed {master}[/dim]")
    if generations is not None:
        config = config.model_copy(
            update={"evolve": config.evolve.model_copy(update={"generations": generations})}
        )
    config = config.with_overrides(seed=master)

    evolve = config.evolve
    bounds = species_bounds(evolve.n_species)
    if mock:
        scenarios = []
        evaluator = SphereEvaluator(bounds)
    else:
        scenarios = _scenario_pool(config)
        evaluator = TissueEvaluator(
            bounds,
            scenarios,
            drug=config.drug,
            host=config.host,
            geometry=config.geometry,
            backend=config.tissue.backend,
            epsilon=config.tissue.epsilon,
            weight=evolve.weight_w,
            dose_cap=evolve.dose_cap,
            dose_normalizer=evolve.dose_normalizer,
            replicates=evolve.replicates,
            t_end=config.tissue.t_end,
        )

    mode = "mock (sphere)" if mock else f"{config.tissue.backend}, {evolve.scenario_mode}"
    console.print(
        Panel.fit(
            f"🧬 [bold blue]Design Optimisation[/bold blue]\n"
            f"{evolve.n_species} species, P={evolve.population}, T={evolve.tournament}, "
            f"{evolve.generations} generations, {mode}, seed {master}",
            border_style="blue",
        )
    )

    with Progress(
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TextColumn("{task.completed}/{task.total}"),
        TimeElapsedColumn(),
        console=console,
    ) as progress:
        task = progress.add_task("Generations", total=evolve.generations)

        def report(stats) -> None:
            progress.console.print(
                f"gen {stats.generation:>4}  best {stats.best:+.4f}  "
                f"mean {stats.mean:+.4f}  min {stats.min:+.4f}"
            )
            progress.advance(task)

        result = run_evolution(
            evolve, bounds, evaluator, jobs=jobs, master_seed=master, on_generation=report
        )

    bundle = write_bundle(Path(out or config.output_dir), config, result, scenarios)

    best = best_solution_record(result, config)
    table = Table(show_header=True, header_style="bold cyan", title="Best Solution")
    table.add_column("Gene", style="white")
    table.add_column("Value", justify="right")
    for name, value in best["genes"].items():
        table.add_row(name, f"{value:.4g}")
    console.print(table)
    console.print(f"Fitness: [bold]{best['fitness']:.4f}[/bold]")
    for index, design in enumerate(best["designs"], start=1):
        console.print(f"NP{index} dose: {design['dose_mg_kg']:.3g} mg/kg")
    console.print(f"[green]✓ Result bundle written to {bundle.directory}[/green]")
    return bundle
