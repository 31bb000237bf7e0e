"""
nanoctl - Main application entry point
"""

import os
import sys
from typing import List, Optional

import typer
from rich import print as rprint
from rich.console import Console
from rich.panel import Panel

from ..core.exceptions import NanoCtlError
from .commands import dose_cmd, evaluate_cmd, grow_cmd, optimize_cmd, sample_cmd, simulate_cmd

# Initialize Typer app
app = typer.Typer(
    name="nanoctl",
    help="🧪 In-silico nanoparticle design pipeline",
    add_completion=False,
    rich_markup_mode="rich",
    context_settings={"help_option_names": ["-h", "--help"]},
)

# Initialize Rich console
console = Console()

# Shared options
config_file_option = typer.Option(
    None,
    "--config",
    "-c",
    help="Path to a YAML configuration file (defaults apply when omitted)",
)

seed_option = typer.Option(
    None,
    "--seed",
    help="Master seed; a fresh one is drawn and printed when omitted",
)

jobs_option = typer.Option(
    1,
    "--jobs",
    "-j",
    min=1,
    help="Worker processes for independent simulations",
)

out_option = typer.Option(
    None,
    "--out",
    "-o",
    help="Output directory (defaults to output_dir from the configuration)",
)

verbose_option = typer.Option(
    False,
    "--verbose",
    "-v",
    help="Enable verbose output",
)

debug_option = typer.Option(
    False,
    "--debug",
    help="Enable debug output",
)


def version_callback(value: bool) -> None:
    """Show version information"""
    if value:
        from .. import __description__, __version__

        rprint(f"[bold blue]nanoctl[/bold blue] v{__version__}")
        rprint(f"[dim]{__description__}[/dim]")
        raise typer.Exit()


def _fail(e: NanoCtlError, prefix: str = "Error") -> None:
    console.print(f"[red]{prefix}:[/red] {e.message}")
    for error in e.details.get("errors", []):
        path, message = error.get("path", "unknown"), error.get("message", "")
        console.print(f"  • [red]{path}[/red]: {message}")
    raise typer.Exit(1)


@app.callback()
def main(
    version: Optional[bool] = typer.Option(
        None,
        "--version",
        callback=version_callback,
        is_eager=True,
        help="Show version and exit",
    ),
    verbose: bool = verbose_option,
    debug: bool = debug_option,
) -> None:
    """
    🧪 In-silico nanoparticle design pipeline

    Grow a virtual tumour, extract tissue scenarios, simulate nanoparticle
    transport and cell kill, and evolve designs for maximum kill at minimum dose.
    """
    if verbose:
        os.environ["NANOCTL_VERBOSE"] = "1"
    if debug:
        os.environ["NANOCTL_DEBUG"] = "1"


@app.command("grow")
def grow_command(
    config_file: Optional[str] = config_file_option,
    seed: Optional[int] = seed_option,
    out: Optional[str] = out_option,
    target: Optional[int] = typer.Option(
        None,
        "--target",
        help="Live cell count to grow to (overrides tumour.target_cell_count)",
    ),
) -> None:
    """
    🧫 Grow a virtual tumour

    Writes a snapshot file, its oxygen sidecar and a type-count summary.
    """
    try:
        grow_cmd.run(config_file=config_file, seed=seed, out=out, target=target)
    except NanoCtlError as e:
        _fail(e)
    except KeyboardInterrupt:
        console.print("\n[yellow]Operation cancelled[/yellow]")
        raise typer.Exit(130)


@app.command("sample")
def sample_command(
    snapshot_file: Optional[str] = typer.Argument(None, help="Tumour snapshot file"),
    n: Optional[int] = typer.Option(None, "--count", "-n", help="Number of scenarios"),
    depth: Optional[str] = typer.Option(
        None,
        "--depth",
        help="Compartments after the VP, or 'auto' for ceil(p95 / 10 um)",
    ),
    worst_case: Optional[str] = typer.Option(
        None,
        "--worst-case",
        help="Write the homo or hetero worst-case scenario instead of sampling",
    ),
    config_file: Optional[str] = config_file_option,
    seed: Optional[int] = seed_option,
    out: Optional[str] = out_option,
) -> None:
    """
    🧭 Extract 1-D tissue scenarios

    Samples vessel-rooted rays from a snapshot, prints the 95th percentile
    cell-to-vessel distance and writes the scenario file.
    """
    try:
        sample_cmd.run(
            snapshot_file=snapshot_file,
            n=n,
            depth=depth,
            worst_case=worst_case,
            config_file=config_file,
            seed=seed,
            out=out,
        )
    except NanoCtlError as e:
        _fail(e)


@app.command("simulate")
def simulate_command(
    scenario_file: Optional[str] = typer.Argument(None, help="Scenario file"),
    worst_case: Optional[str] = typer.Option(
        None, "--worst-case", help="Use the homo or hetero worst-case scenario"
    ),
    preset: Optional[str] = typer.Option(
        None,
        "--preset",
        help="Reference design set: homogeneous, heterogeneous-1, heterogeneous-2",
    ),
    design: Optional[List[str]] = typer.Option(
        None,
        "--design",
        "-d",
        help="Design as D,ka,NP0,E (repeat for NP2)",
    ),
    backend: Optional[str] = typer.Option(None, "--backend", help="ssa or tau"),
    seeds: int = typer.Option(1, "--seeds", min=1, help="Replicate simulations per scenario"),
    trajectory: bool = typer.Option(
        False, "--trajectory", help="Dump the first replicate's trajectory CSV"
    ),
    config_file: Optional[str] = config_file_option,
    seed: Optional[int] = seed_option,
    out: Optional[str] = out_option,
) -> None:
    """
    💉 Simulate fixed nanoparticle designs

    Prints the kill tallies and injected dose; doses above the toxicity cap
    are simulated with a warning.
    """
    try:
        simulate_cmd.run(
            scenario_file=scenario_file,
            worst_case=worst_case,
            preset=preset,
            designs=design,
            backend=backend,
            seeds=seeds,
            trajectory=trajectory,
            config_file=config_file,
            seed=seed,
            out=out,
        )
    except NanoCtlError as e:
        _fail(e, "Simulation failed")
    except KeyboardInterrupt:
        console.print("\n[yellow]Operation cancelled[/yellow]")
        raise typer.Exit(130)


@app.command("optimize")
def optimize_command(
    config_file: Optional[str] = config_file_option,
    seed: Optional[int] = seed_option,
    jobs: int = jobs_option,
    out: Optional[str] = out_option,
    mock: bool = typer.Option(
        False, "--mock", help="Use the synthetic sphere evaluator instead of simulations"
    ),
    generations: Optional[int] = typer.Option(
        None, "--generations", min=1, help="Override evolve.generations"
    ),
) -> None:
    """
    🧬 Evolve nanoparticle designs

    Runs the evolutionary search and writes a result bundle with the run log,
    fitness summary and best solution.
    """
    try:
        optimize_cmd.run(
            config_file=config_file,
            seed=seed,
            jobs=jobs,
            out=out,
            mock=mock,
            generations=generations,
        )
    except NanoCtlError as e:
        _fail(e, "Optimisation failed")
    except KeyboardInterrupt:
        console.print("\n[yellow]Operation cancelled[/yellow]")
        raise typer.Exit(130)


@app.command("evaluate")
def evaluate_command(
    solution_file: str = typer.Argument(..., help="best_solution.yaml from a result bundle"),
    scenario_file: str = typer.Argument(..., help="Scenario file to evaluate on"),
    seeds: int = typer.Option(1, "--seeds", min=1, help="Replicates per scenario"),
    config_file: Optional[str] = config_file_option,
    seed: Optional[int] = seed_option,
    jobs: int = jobs_option,
    out: Optional[str] = out_option,
) -> None:
    """
    📊 Evaluate a solution across a scenario pool

    Writes per-scenario kill fractions and prints the aggregate.
    """
    try:
        evaluate_cmd.run(
            solution_file=solution_file,
            scenario_file=scenario_file,
            seeds=seeds,
            config_file=config_file,
            seed=seed,
            jobs=jobs,
            out=out,
        )
    except NanoCtlError as e:
        _fail(e, "Evaluation failed")
    except KeyboardInterrupt:
        console.print("\n[yellow]Operation cancelled[/yellow]")
        raise typer.Exit(130)


@app.command("dose")
def dose_command(
    preset: Optional[str] = typer.Option(None, "--preset", help="Reference design set"),
    design: Optional[List[str]] = typer.Option(
        None, "--design", "-d", help="Design as D,ka,NP0,E (repeat for NP2)"
    ),
    pid: Optional[float] = typer.Option(
        None, "--pid", help="Override the fraction of injected dose reaching the tumour"
    ),
    config_file: Optional[str] = config_file_option,
) -> None:
    """
    ⚖️ Dosimetry report

    Prints injected dose, radius, K_D, lethal threshold and toxicity per design.
    """
    try:
        dose_cmd.run(preset=preset, designs=design, pid=pid, config_file=config_file)
    except NanoCtlError as e:
        _fail(e)


@app.command("version")
def version_command() -> None:
    """
    📋 Show detailed version information
    """
    from .. import __description__, __version__

    panel = Panel(
        f"[bold blue]nanoctl[/bold blue] v{__version__}\n"
        f"[dim]{__description__}[/dim]\n\n"
        f"Python: {sys.version.split()[0]}\n"
        f"Platform: {sys.platform}",
        title="Version Information",
        border_style="blue",
    )

    console.print(panel)


def handle_exception(exc_type, exc_value, exc_traceback):
    """Global exception handler for better error reporting"""
    if issubclass(exc_type, KeyboardInterrupt):
        console.print("\n[yellow]Operation cancelled by user[/yellow]")
        return

    if isinstance(exc_value, NanoCtlError):
        console.print(f"[red]Error [{exc_value.code}]:[/red] {exc_value.message}")

        if exc_value.details:
            console.print("[dim]Details:[/dim]")
            for key, value in exc_value.details.items():
                console.print(f"  {key}: {value}")
        return

    # For unexpected exceptions, show more detail in debug mode
    if os.getenv("NANOCTL_DEBUG"):
        import traceback

        console.print("[red]Unexpected error occurred:[/red]")
        console.print(traceback.format_exception(exc_type, exc_value, exc_traceback))
    else:
        console.print(f"[red]Unexpected error:[/red] {exc_value}")
        console.print("[dim]Run with --debug for more details[/dim]")


# Set global exception handler
sys.excepthook = handle_exception


if __name__ == "__main__":
    app()
