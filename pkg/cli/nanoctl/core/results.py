"""
Result bundle persistence

An optimisation bundle directory holds::

    config.yaml          effective configuration (with the seed actually used)
    scenarios.txt        scenario pool the run evaluated on
    run_log.csv          one row per fitness evaluation
    summary.csv          generation,best,mean,min
    best_history.csv     best genes and derived quantities per generation
    best_solution.yaml   final best genes plus dose/radius/K_D/NP_max per species
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np
import pandas as pd
import yaml

from .config import PipelineConfig
from .dosimetry import NanoparticleDesign, design_summary
from .evolve.runner import EvolutionRun
from .exceptions import ConfigurationError
from .scenario import Scenario, write_scenarios

MAX_DOSE_COLUMNS = 2
FULL_KILL = 0.99


@dataclass(frozen=True)
class ResultBundle:
    directory: Path
    config: Path
    scenarios: Path
    run_log: Path
    summary: Path
    best_history: Path
    best_solution: Path


def run_log_frame(run: EvolutionRun) -> pd.DataFrame:
    """Audit log: every evaluation with genes, fitness, doses and kill fractions"""
    n_genes = len(run.bounds)
    rows = []
    for record in run.log:
        row: Dict[str, Any] = {"generation": record.generation, "individual": record.individual}
        for i in range(n_genes):
            row[f"gene_{i}"] = float(record.genes[i])
        row["fitness"] = record.fitness
        for s in range(MAX_DOSE_COLUMNS):
            row[f"dose_np{s + 1}"] = record.doses[s] if s < len(record.doses) else np.nan
        row["cc_frac"] = record.cc_frac
        row["csc_frac"] = record.csc_frac
        row["penalized"] = int(record.penalized)
        rows.append(row)
    columns = (
        ["generation", "individual"]
        + [f"gene_{i}" for i in range(n_genes)]
        + ["fitness", "dose_np1", "dose_np2", "cc_frac", "csc_frac", "penalized"]
    )
    return pd.DataFrame(rows, columns=columns)


def summary_frame(run: EvolutionRun) -> pd.DataFrame:
    return pd.DataFrame(
        [(g.generation, g.best, g.mean, g.min) for g in run.generations],
        columns=["generation", "best", "mean", "min"],
    )


def design_record(design: NanoparticleDesign, config: PipelineConfig) -> Dict[str, Any]:
    summary = design_summary(
        design, config.drug, config.host, config.geometry, config.evolve.dose_cap
    )
    record = design.model_dump()
    record.update(
        dose_mg_kg=summary.dose_mg_kg,
        radius_nm=summary.radius_nm,
        kd_nm=summary.kd_nm,
        lethal_threshold=summary.lethal_threshold,
    )
    return record


def best_history_frame(run: EvolutionRun, config: PipelineConfig) -> pd.DataFrame:
    """Best-so-far genes per generation with the derived physical quantities"""
    rows = []
    for stats in run.generations:
        row: Dict[str, Any] = {"generation": stats.generation, "fitness": stats.best}
        row.update({name: float(v) for name, v in zip(run.bounds.names, stats.best_genes)})
        for s, design in enumerate(run.bounds.to_designs(stats.best_genes), start=1):
            derived = design_record(design, config)
            for key in ("dose_mg_kg", "radius_nm", "kd_nm", "lethal_threshold"):
                row[f"{key}_np{s}"] = derived[key]
        rows.append(row)
    return pd.DataFrame(rows)


def best_solution_record(run: EvolutionRun, config: PipelineConfig) -> Dict[str, Any]:
    if run.best is None:
        raise ConfigurationError("Run has no evaluated individual")
    best = run.best
    return {
        "fitness": float(best.fitness),
        "generation": best.generation,
        "individual": best.individual,
        "cc_frac": float(best.cc_frac),
        "csc_frac": float(best.csc_frac),
        "genes": {name: float(v) for name, v in zip(run.bounds.names, best.genes)},
        "designs": [design_record(d, config) for d in run.bounds.to_designs(best.genes)],
    }


def write_bundle(
    directory: Path,
    config: PipelineConfig,
    run: EvolutionRun,
    scenarios: Sequence[Scenario],
) -> ResultBundle:
    """Write every bundle file; the echoed config carries the seed that was used"""
    directory.mkdir(parents=True, exist_ok=True)
    bundle = ResultBundle(
        directory=directory,
        config=directory / "config.yaml",
        scenarios=directory / "scenarios.txt",
        run_log=directory / "run_log.csv",
        summary=directory / "summary.csv",
        best_history=directory / "best_history.csv",
        best_solution=directory / "best_solution.yaml",
    )
    config.with_overrides(seed=run.master_seed).save_to_file(bundle.config)
    write_scenarios(scenarios, bundle.scenarios)
    run_log_frame(run).to_csv(bundle.run_log, index=False)
    summary_frame(run).to_csv(bundle.summary, index=False)
    best_history_frame(run, config).to_csv(bundle.best_history, index=False)
    with open(bundle.best_solution, "w") as f:
        yaml.dump(best_solution_record(run, config), f, default_flow_style=False, sort_keys=False)
    return bundle


def load_best_solution(path: Path) -> List[NanoparticleDesign]:
    """Designs stored in a best-solution record"""
    if not path.exists():
        raise ConfigurationError(f"Solution file not found: {path}")
    with open(path, "r") as f:
        data = yaml.safe_load(f) or {}
    designs = data.get("designs")
    if not designs:
        raise ConfigurationError(f"{path} has no designs")
    fields = set(NanoparticleDesign.model_fields)
    try:
        return [NanoparticleDesign(**{k: v for k, v in d.items() if k in fields}) for d in designs]
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"Invalid design in {path}: {e}")


def evaluation_frame(rows: Sequence[Dict[str, Any]]) -> pd.DataFrame:
    columns = [
        "scenario",
        "seed",
        "cc_total",
        "cc_killed",
        "cc_frac",
        "csc_total",
        "csc_killed",
        "csc_frac",
    ]
    return pd.DataFrame(list(rows), columns=columns)


def evaluation_aggregate(frame: pd.DataFrame) -> Dict[str, float]:
    """Mean kill fractions and the share of scenarios with at least 99 % CC kill"""
    if frame.empty:
        nan = float("nan")
        return {"scenarios": 0, "cc_frac_mean": nan, "csc_frac_mean": nan, "full_kill_share": nan}
    per_scenario = frame.groupby("scenario", sort=False)[["cc_frac", "csc_frac"]].mean()
    return {
        "scenarios": int(len(per_scenario)),
        "cc_frac_mean": float(per_scenario["cc_frac"].mean()),
        "csc_frac_mean": float(per_scenario["csc_frac"].mean()),
        "full_kill_share": float((per_scenario["cc_frac"] >= FULL_KILL).mean()),
    }
