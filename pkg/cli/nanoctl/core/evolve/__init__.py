"""
Evolutionary optimisation of nanoparticle designs
"""

from .benchmarks import SphereEvaluator
from .fitness import (
    EvaluationRecord,
    EvaluationTask,
    TissueEvaluator,
    fitness,
    penalty_fitness,
    weighted_fitness,
)
from .genes import Gene, GeneBounds, GeneScale, Individual, heterogeneous_bounds, homogeneous_bounds
from .operators import crossover, init_population, mutate, tournament_select
from .runner import EvolutionRun, EvolveConfig, GenerationStats, run

__all__ = [
    "EvaluationRecord",
    "EvaluationTask",
    "EvolutionRun",
    "EvolveConfig",
    "Gene",
    "GeneBounds",
    "GeneScale",
    "GenerationStats",
    "Individual",
    "SphereEvaluator",
    "TissueEvaluator",
    "crossover",
    "fitness",
    "heterogeneous_bounds",
    "homogeneous_bounds",
    "init_population",
    "mutate",
    "penalty_fitness",
    "run",
    "tournament_select",
    "weighted_fitness",
]
