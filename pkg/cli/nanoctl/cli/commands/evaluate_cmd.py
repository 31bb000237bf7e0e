"""
Evaluate command - replay a solution across a scenario pool
"""

from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from rich.console import Console
from rich.table import Table

from ...core.config import PipelineConfig
from ...core.dosimetry import DrugModel, HostModel, NanoparticleDesign
from ...core.exceptions import ValidationError
from ...core.results import evaluation_aggregate, evaluation_frame, load_best_solution
from ...core.scenario import Scenario, read_scenarios
from ...core.seeding import derive_seed, resolve_seed
from ...core.tissue import build_system, simulate

console = Console()

EvaluationJob = Tuple[
    Scenario, Sequence[NanoparticleDesign], DrugModel, HostModel, Optional[float], str, float, int
]


def _evaluate_one(job: EvaluationJob) -> Dict[str, Any]:
    scenario, designs, drug, host, t_end, backend, epsilon, seed = job
    system = build_system(scenario, designs, drug, host, t_end)
    _, outcome = simulate(system, seed, backend, epsilon)
    return {
        "scenario": scenario.id,
        "seed": seed,
        "cc_total": outcome.cc_total,
        "cc_killed": outcome.cc_killed,
        "cc_frac": outcome.cc_fraction,
        "csc_total": outcome.csc_total,
        "csc_killed": outcome.csc_killed,
        "csc_frac": outcome.csc_fraction,
    }


def run(
    solution_file: str,
    scenario_file: str,
    seeds: int = 1,
    config_file: Optional[str] = None,
    seed: Optional[int] = None,
    jobs: int = 1,
    out: Optional[str] = None,
) -> Path:
    """Simulate a best-solution record on every scenario and write evaluation.csv"""
    config = PipelineConfig.load_or_default(Path(config_file) if config_file else None)
    if seeds < 1 or jobs < 1:
        raise ValidationError("--seeds and --jobs must be >= 1")

    designs = load_best_solution(Path(solution_file))
    scenarios = read_scenarios(Path(scenario_file))
    requested = seed if seed is not None else config.seed
    master = resolve_seed(requested)
    if requested is None:
        console.print(f"[dim]No seed given, using seed {master}[/dim]")

    tissue = config.tissue
    job_list: List[EvaluationJob] = [
        (
            scenario,
            designs,
            config.drug,
            config.host,
            tissue.t_end,
            tissue.backend,
            tissue.epsilon,
            derive_seed(master, index, replicate),
        )
        for index, scenario in enumerate(scenarios)
        for replicate in range(seeds)
    ]

    with console.status(f"Evaluating {len(job_list)} simulations..."):
        if jobs > 1 and job_list:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                rows = list(pool.map(_evaluate_one, job_list))
        else:
            rows = [_evaluate_one(job) for job in job_list]

    out_dir = Path(out or config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    frame = evaluation_frame(rows)
    path = out_dir / "evaluation.csv"
    frame.to_csv(path, index=False)

    summary = evaluation_aggregate(frame)
    table = Table(show_header=True, header_style="bold cyan", title="Evaluation Summary")
    table.add_column("Metric", style="white")
    table.add_column("Value", justify="right")
    table.add_row("Scenarios", str(summary["scenarios"]))
    table.add_row("Mean CC kill", f"{summary['cc_frac_mean']:.3f}")
    table.add_row("Mean CSC kill", f"{summary['csc_frac_mean']:.3f}")
    table.add_row("Scenarios with ≥99% CC kill", f"{summary['full_kill_share']:.1%}")
    console.print(table)
    console.print(f"[green]✓ Evaluation written to {path}[/green]")
    return path
