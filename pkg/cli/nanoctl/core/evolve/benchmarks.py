"""
Synthetic evaluators for exercising the optimiser without tissue simulation
"""

from typing import Optional, Sequence

import numpy as np

from .fitness import EvaluationRecord, EvaluationTask
from .genes import GeneBounds, GeneScale


class SphereEvaluator:
    """
    Negative squared distance to a hidden optimum, measured in normalised gene
    coordinates (log10 for log-scale genes, then scaled to [0, 1]).
    """

    def __init__(self, bounds: GeneBounds, optimum: Optional[Sequence[float]] = None):
        self.bounds = bounds
        if optimum is None:
            # geometric midpoint of every gene range
            optimum = [
                np.sqrt(g.lower * g.upper) if g.scale == GeneScale.LOG else (g.lower + g.upper) / 2
                for g in bounds.genes
            ]
        self.optimum = np.asarray(optimum, dtype=np.float64)
        self.scenarios = ()

    @property
    def n_species(self) -> int:
        return self.bounds.n_species

    def normalise(self, genes: np.ndarray) -> np.ndarray:
        out = np.empty(len(self.bounds))
        for i, gene in enumerate(self.bounds.genes):
            if gene.scale == GeneScale.LOG:
                lo, hi, v = np.log10(gene.lower), np.log10(gene.upper), np.log10(genes[i])
            else:
                lo, hi, v = gene.lower, gene.upper, genes[i]
            out[i] = (v - lo) / (hi - lo)
        return out

    def distance(self, genes: np.ndarray) -> float:
        """Euclidean distance to the optimum in normalised coordinates"""
        return float(np.linalg.norm(self.normalise(genes) - self.normalise(self.optimum)))

    def __call__(self, task: EvaluationTask) -> EvaluationRecord:
        return EvaluationRecord(
            generation=task.generation,
            individual=task.individual,
            genes=task.genes.copy(),
            fitness=-self.distance(task.genes) ** 2,
            doses=(),
            cc_frac=0.0,
            csc_frac=0.0,
            penalized=False,
        )
