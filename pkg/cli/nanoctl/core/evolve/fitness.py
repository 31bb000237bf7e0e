"""
Fitness of a nanoparticle design

    homogeneous:    w * CC_killed/N_CC - sum(ID) / (n_species * normalizer)
    heterogeneous:  w * (CC_killed/N_CC + CSC_killed/N_CSC) - sum(ID) / (n_species * normalizer)

Any species dose above the cap scores -sum(ID / normalizer) and is never
simulated. Kill fractions are averaged over the evaluated scenarios and
replicates.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..dosimetry import DrugModel, HostModel, PenetrationGeometry, injected_dose
from ..exceptions import EvaluationError, NanoCtlError
from ..scenario import Scenario
from ..seeding import derive_seed
from ..tissue import build_system, simulate
from .genes import GeneBounds


@dataclass(frozen=True)
class EvaluationTask:
    """One fitness evaluation; scenario indices point into the evaluator's pool"""

    generation: int
    individual: int
    genes: np.ndarray
    scenario_indices: Tuple[int, ...]
    master_seed: int


@dataclass
class EvaluationRecord:
    """Audit-log row of one evaluation"""

    generation: int
    individual: int
    genes: np.ndarray
    fitness: float
    doses: Tuple[float, ...]
    cc_frac: float
    csc_frac: float
    penalized: bool
    scenario_ids: Tuple[str, ...] = ()
    seeds: Tuple[int, ...] = field(default_factory=tuple)


def penalty_fitness(doses: Sequence[float], normalizer: float) -> float:
    return -float(sum(d / normalizer for d in doses))


def weighted_fitness(
    cc_frac: float,
    csc_frac: float,
    doses: Sequence[float],
    weight: float,
    normalizer: float,
) -> float:
    """Kill reward minus normalised dose; the CSC term applies with two species"""
    n_species = len(doses)
    reward = cc_frac + (csc_frac if n_species > 1 else 0.0)
    return weight * reward - float(sum(doses)) / (n_species * normalizer)


class TissueEvaluator:
    """Scores gene vectors by simulating the designs on a scenario pool"""

    def __init__(
        self,
        bounds: GeneBounds,
        scenarios: Sequence[Scenario],
        drug: Optional[DrugModel] = None,
        host: Optional[HostModel] = None,
        geometry: Optional[PenetrationGeometry] = None,
        backend: str = "ssa",
        epsilon: float = 0.03,
        weight: float = 1.0,
        dose_cap: float = 55.0,
        dose_normalizer: float = 250.0,
        replicates: int = 1,
        t_end: Optional[float] = None,
    ):
        if not scenarios:
            raise EvaluationError("Evaluator needs at least one scenario")
        self.bounds = bounds
        self.scenarios = list(scenarios)
        self.drug = drug or DrugModel()
        self.host = host or HostModel()
        self.geometry = geometry or PenetrationGeometry()
        self.backend = backend
        self.epsilon = epsilon
        self.weight = weight
        self.dose_cap = dose_cap
        self.dose_normalizer = dose_normalizer
        self.replicates = replicates
        self.t_end = t_end

    @property
    def n_species(self) -> int:
        return self.bounds.n_species

    def doses(self, genes: np.ndarray) -> Tuple[float, ...]:
        return tuple(
            injected_dose(d, self.drug, self.host, self.geometry)
            for d in self.bounds.to_designs(genes)
        )

    def __call__(self, task: EvaluationTask) -> EvaluationRecord:
        try:
            return self._evaluate(task)
        except EvaluationError:
            raise
        except NanoCtlError as e:
            raise EvaluationError(
                f"Evaluation failed: {e.message}",
                generation=task.generation,
                individual=task.individual,
                details={"cause": e.code, "scenarios": list(task.scenario_indices)},
            )

    def _evaluate(self, task: EvaluationTask) -> EvaluationRecord:
        designs = self.bounds.to_designs(task.genes)
        doses = tuple(injected_dose(d, self.drug, self.host, self.geometry) for d in designs)
        scenario_ids = tuple(self.scenarios[i].id for i in task.scenario_indices)

        if any(dose > self.dose_cap for dose in doses):
            return EvaluationRecord(
                generation=task.generation,
                individual=task.individual,
                genes=task.genes.copy(),
                fitness=penalty_fitness(doses, self.dose_normalizer),
                doses=doses,
                cc_frac=0.0,
                csc_frac=0.0,
                penalized=True,
                scenario_ids=scenario_ids,
            )

        cc: List[float] = []
        csc: List[float] = []
        seeds: List[int] = []
        for index in task.scenario_indices:
            system = build_system(self.scenarios[index], designs, self.drug, self.host, self.t_end)
            for replicate in range(self.replicates):
                seed = derive_seed(
                    task.master_seed, task.generation, task.individual, index, replicate
                )
                _, outcome = simulate(system, seed, self.backend, self.epsilon)
                cc.append(outcome.cc_fraction)
                csc.append(outcome.csc_fraction)
                seeds.append(seed)

        cc_frac, csc_frac = float(np.mean(cc)), float(np.mean(csc))
        return EvaluationRecord(
            generation=task.generation,
            individual=task.individual,
            genes=task.genes.copy(),
            fitness=weighted_fitness(cc_frac, csc_frac, doses, self.weight, self.dose_normalizer),
            doses=doses,
            cc_frac=cc_frac,
            csc_frac=csc_frac,
            penalized=False,
            scenario_ids=scenario_ids,
            seeds=tuple(seeds),
        )


def fitness(
    genes: np.ndarray,
    evaluator: TissueEvaluator,
    master_seed: int,
    generation: int = 0,
    individual: int = 0,
) -> float:
    """Fitness of ``genes`` over every scenario in the evaluator's pool"""
    task = EvaluationTask(
        generation=generation,
        individual=individual,
        genes=np.asarray(genes, dtype=np.float64),
        scenario_indices=tuple(range(len(evaluator.scenarios))),
        master_seed=master_seed,
    )
    return evaluator(task).fitness
