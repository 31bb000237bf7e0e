"""
Variation and selection operators
"""

from typing import TYPE_CHECKING, List, Sequence

import numpy as np

from ..exceptions import ValidationError
from .genes import GeneBounds, GeneScale, Individual

if TYPE_CHECKING:
    from .runner import EvolveConfig


def random_genes(bounds: GeneBounds, rng: np.random.Generator) -> np.ndarray:
    """Log-uniform draw for log-scale genes, uniform for linear ones"""
    genes = np.empty(len(bounds))
    for i, gene in enumerate(bounds.genes):
        if gene.scale == GeneScale.LOG:
            genes[i] = np.exp(rng.uniform(np.log(gene.lower), np.log(gene.upper)))
        else:
            genes[i] = rng.uniform(gene.lower, gene.upper)
    return bounds.clamp(genes)


def init_population(
    bounds: GeneBounds, config: "EvolveConfig", rng: np.random.Generator
) -> List[Individual]:
    return [Individual(genes=random_genes(bounds, rng)) for _ in range(config.population)]


def _rank_key(population: Sequence[Individual], index: int):
    fitness = population[index].fitness
    if fitness is None:
        raise ValidationError(f"Individual {index} has not been evaluated")
    # higher fitness wins, then lower index
    return (fitness, -index)


def tournament_index(population: Sequence[Individual], size: int, rng: np.random.Generator) -> int:
    """Index of the winner of a size-``size`` tournament drawn with replacement"""
    if not population:
        raise ValidationError("Cannot select from an empty population")
    if size < 1:
        raise ValidationError(f"Tournament size must be >= 1, got {size}")
    draws = rng.integers(len(population), size=size)
    return max((int(i) for i in draws), key=lambda i: _rank_key(population, i))


def tournament_select(
    population: Sequence[Individual], size: int, rng: np.random.Generator
) -> Individual:
    return population[tournament_index(population, size, rng)]


def tournament_loser(population: Sequence[Individual], size: int, rng: np.random.Generator) -> int:
    """Index of the worst of a size-``size`` tournament; ties go to the higher index"""
    if not population:
        raise ValidationError("Cannot select from an empty population")
    draws = rng.integers(len(population), size=size)
    return min((int(i) for i in draws), key=lambda i: _rank_key(population, i))


def crossover(a: Individual, b: Individual, rng: np.random.Generator) -> Individual:
    """Uniform crossover: each gene comes from ``a`` or ``b`` with probability 1/2"""
    if a.genes.shape != b.genes.shape:
        raise ValidationError("Parents have different gene counts")
    from_a = rng.random(a.genes.shape[0]) < 0.5
    return Individual(genes=np.where(from_a, a.genes, b.genes))


def apply_step(ind: Individual, gene: int, step: float, bounds: GeneBounds) -> Individual:
    """Scale one gene by (1 + step) and clamp to the bounds"""
    genes = ind.genes.copy()
    genes[gene] *= 1.0 + step
    return Individual(genes=bounds.clamp(genes))


def mutate(
    ind: Individual, config: "EvolveConfig", rng: np.random.Generator, bounds: GeneBounds
) -> Individual:
    """
    With probability ``config.mutation_prob`` scale one uniformly chosen gene by
    1 + u, u ~ U(-mutation_step, +mutation_step), then clamp. Otherwise the
    genes come back unchanged.
    """
    if rng.random() >= config.mutation_prob:
        return Individual(genes=ind.genes.copy())
    gene = int(rng.integers(len(ind.genes)))
    step = rng.uniform(-config.mutation_step, config.mutation_step)
    return apply_step(ind, gene, step, bounds)
