"""
Evolutionary optimisation loop

Generational replacement keeps the single best individual unchanged (and
re-evaluates it with fresh seeds); the rest of the next population is
mutate(crossover(select, select)). Steady-state replacement instead lets each
offspring replace the loser of a tournament among everyone but the current
best. Evaluations within a generation are independent and may run on a
process pool; every evaluation seed is derived from the master seed, so the
worker count never changes the result.
"""

import os
from concurrent.futures import Executor, ProcessPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass, field
from typing import Callable, List, Literal, Optional, Protocol, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from rich.console import Console

from ..exceptions import ValidationError
from ..seeding import make_rng
from .fitness import EvaluationRecord, EvaluationTask
from .genes import GeneBounds, Individual
from .operators import crossover, init_population, mutate, tournament_loser, tournament_select

# independent random streams under the master seed
OPERATOR_STREAM = 0
SCENARIO_STREAM = 1

console = Console(stderr=True)


class EvolveConfig(BaseModel):
    """Optimiser hyperparameters and fitness settings"""

    model_config = ConfigDict(extra="forbid")

    population: int = Field(default=20, ge=2)
    tournament: int = Field(default=2, ge=1)
    mutation_prob: float = Field(default=0.2, ge=0, le=1)
    mutation_step: float = Field(default=0.05, ge=0, lt=1)
    generations: int = Field(default=100, ge=1)
    weight_w: float = Field(default=1.0, gt=0)
    n_species: int = Field(default=1, ge=1, le=2)
    scenario_mode: Literal["worst_case", "random_k"] = "worst_case"
    scenario_k: int = Field(default=5, ge=1)
    dose_normalizer: float = Field(default=250.0, gt=0, description="mg/kg per species")
    dose_cap: float = Field(default=55.0, gt=0, description="mg/kg per species")
    replicates: int = Field(default=1, ge=1)
    replacement: Literal["generational", "steady_state"] = "generational"
    master_seed: Optional[int] = Field(default=None, ge=0)


class Evaluator(Protocol):
    scenarios: Sequence

    def __call__(self, task: EvaluationTask) -> EvaluationRecord: ...


@dataclass
class GenerationStats:
    """Fitness statistics of one generation; ``best`` is the best score seen so far"""

    generation: int
    best: float
    mean: float
    min: float
    current_best: float
    best_genes: np.ndarray


@dataclass
class EvolutionRun:
    bounds: GeneBounds
    config: EvolveConfig
    master_seed: int
    generations: List[GenerationStats] = field(default_factory=list)
    log: List[EvaluationRecord] = field(default_factory=list)
    best: Optional[EvaluationRecord] = None

    @property
    def best_fitness(self) -> float:
        return self.best.fitness if self.best is not None else float("-inf")


def _scenario_indices(
    config: EvolveConfig, pool_size: int, master_seed: int, generation: int
) -> Tuple[int, ...]:
    if pool_size == 0:
        return ()
    if config.scenario_mode == "worst_case":
        return tuple(range(pool_size))
    rng = make_rng(master_seed, SCENARIO_STREAM, generation)
    replace = config.scenario_k > pool_size
    picks = rng.choice(pool_size, size=config.scenario_k, replace=replace)
    return tuple(int(i) for i in picks)


def _best_index(population: Sequence[Individual]) -> int:
    # ties go to the lower index
    scores = [ind.fitness for ind in population]
    return int(np.argmax(scores))


def _evaluate(
    pool: Optional[Executor],
    evaluator: Evaluator,
    individuals: Sequence[Individual],
    generation: int,
    indices: Tuple[int, ...],
    master_seed: int,
) -> List[EvaluationRecord]:
    tasks = [
        EvaluationTask(
            generation=generation,
            individual=i,
            genes=ind.genes,
            scenario_indices=indices,
            master_seed=master_seed,
        )
        for i, ind in enumerate(individuals)
    ]
    if pool is not None:
        records = list(pool.map(evaluator, tasks))
    else:
        records = [evaluator(t) for t in tasks]
    for ind, record in zip(individuals, records):
        ind.fitness = record.fitness
        ind.eval_metadata = {"scenarios": record.scenario_ids, "seeds": record.seeds}
    return records


def _offspring(
    population: Sequence[Individual],
    count: int,
    config: EvolveConfig,
    bounds: GeneBounds,
    rng: np.random.Generator,
) -> List[Individual]:
    children = []
    for _ in range(count):
        a = tournament_select(population, config.tournament, rng)
        b = tournament_select(population, config.tournament, rng)
        children.append(mutate(crossover(a, b, rng), config, rng, bounds))
    return children


def _steady_state_insert(
    population: List[Individual],
    offspring: Sequence[Individual],
    config: EvolveConfig,
    rng: np.random.Generator,
) -> None:
    for child in offspring:
        protected = _best_index(population)
        others = [i for i in range(len(population)) if i != protected]
        loser = others[tournament_loser([population[i] for i in others], config.tournament, rng)]
        population[loser] = child


def run(
    config: EvolveConfig,
    bounds: GeneBounds,
    evaluator: Evaluator,
    jobs: int = 1,
    master_seed: Optional[int] = None,
    on_generation: Optional[Callable[[GenerationStats], None]] = None,
) -> EvolutionRun:
    """Run the optimiser for ``config.generations`` generations"""
    seed = master_seed if master_seed is not None else config.master_seed
    if seed is None:
        raise ValidationError("A master seed is required to run the optimiser")
    if jobs < 1:
        raise ValidationError(f"jobs must be >= 1, got {jobs}")

    result = EvolutionRun(bounds=bounds, config=config, master_seed=seed)
    rng = make_rng(seed, OPERATOR_STREAM)
    pool_size = len(evaluator.scenarios)

    executor = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else nullcontext()
    with executor as pool:
        population = init_population(bounds, config, rng)
        for generation in range(config.generations):
            indices = _scenario_indices(config, pool_size, seed, generation)
            if generation == 0:
                records = _evaluate(pool, evaluator, population, generation, indices, seed)
            elif config.replacement == "generational":
                elite = Individual(genes=population[_best_index(population)].genes.copy())
                children = [elite] + _offspring(
                    population, config.population - 1, config, bounds, rng
                )
                records = _evaluate(pool, evaluator, children, generation, indices, seed)
                population = children
            else:
                children = _offspring(population, config.population - 1, config, bounds, rng)
                records = _evaluate(pool, evaluator, children, generation, indices, seed)
                _steady_state_insert(population, children, config, rng)

            result.log.extend(records)
            if os.getenv("NANOCTL_VERBOSE"):
                penalized = sum(r.penalized for r in records)
                console.print(
                    f"[dim]Generation {generation}: {penalized}/{len(records)} designs over "
                    f"the dose cap, scenarios {list(indices)}[/dim]"
                )
            for record in records:
                if result.best is None or record.fitness > result.best.fitness:
                    result.best = record

            scores = np.array([ind.fitness for ind in population], dtype=np.float64)
            stats = GenerationStats(
                generation=generation,
                best=result.best_fitness,
                mean=float(scores.mean()),
                min=float(scores.min()),
                current_best=float(scores.max()),
                best_genes=result.best.genes.copy(),  # type: ignore[union-attr]
            )
            result.generations.append(stats)
            if on_generation is not None:
                on_generation(stats)
    return result
