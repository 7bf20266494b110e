"""Genetic search over function-to-component allocations.

A chromosome holds one component id per function.  Locked genes (pre-allocated
functions) are set once and never touched; free genes only ever take system
component ids.  Each generation keeps the fittest share of the population,
breeds a mating pool drawn from the top of the survivors, mutates part of the
offspring and merges survivors and offspring into the next population.  The
loop stops at ``max_generations`` or when fewer than three individuals remain.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, fields
from enum import Enum
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from dsmopt.coupling import CouplingEvaluator
from dsmopt.model import Allocation, ArchitectureModel, ModelError

RNG_NAME = "numpy.PCG64"
MIN_POPULATION = 3


class Termination(str, Enum):
    MAX_GENERATIONS = "max_generations"
    POPULATION_UNDERFLOW = "population_underflow"


@dataclass(frozen=True)
class GaConfig:
    """GA parameters; defaults are the AIDA-light working set."""

    initial_population: int = 1000
    max_generations: int = 50
    survivor_pct: float = 0.7
    parent_pct: float = 0.2
    child_mutation_pct: float = 0.7
    gene_mutation_pct: float = 0.3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.initial_population < MIN_POPULATION:
            raise ValueError(f"initial_population must be >= {MIN_POPULATION}")
        if self.max_generations < 1:
            raise ValueError("max_generations must be positive")
        for name in ("survivor_pct", "parent_pct"):
            if not 0.0 < getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in (0, 1]")
        for name in ("child_mutation_pct", "gene_mutation_pct"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "GaConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ValueError(f"unknown GA config key(s) {unknown}")
        return cls(**dict(doc))

    # Settings used for the 47-function AIDA model.
    @classmethod
    def large(cls, seed: int = 0) -> "GaConfig":
        return cls(2500, 200, 0.7, 0.3, 0.4, 0.7, seed)


@dataclass(frozen=True)
class Individual:
    chromosome: Allocation
    fitness: float

    @property
    def key(self) -> tuple[float, tuple[int, ...]]:
        return (self.fitness, self.chromosome.assignment)


@dataclass(frozen=True)
class RunReport:
    best: Individual
    generations_run: int
    evaluations: int
    history: tuple[float, ...]
    wall_time: float
    termination: Termination
    seed: int


def _count(fraction: float, size: int, rounding) -> int:
    # Round away float noise first: 0.7 * 10 must give 7, not 8.
    return int(rounding(round(fraction * size, 9)))


class _Search:
    """Per-model constants shared by the GA operators."""

    def __init__(self, model: ArchitectureModel, include_actors: bool = True) -> None:
        self.model = model
        self.free = np.array(model.free_positions, dtype=np.intp)
        self.systems = np.array(model.system_ids, dtype=np.intp)
        self.template = np.zeros(model.n_functions, dtype=np.intp)
        for f in model.functions:
            if f.locked:
                self.template[f.id] = f.pre_allocated_to
        if self.free.size and not self.systems.size:
            raise ModelError("no system component available for free functions", "components")
        self.evaluate = CouplingEvaluator(model, include_actors=include_actors)

    def individuals(self, chromosomes: Sequence[Allocation]) -> list[Individual]:
        if not chromosomes:
            return []
        matrix = np.array([c.assignment for c in chromosomes], dtype=np.intp)
        scores = self.evaluate(matrix)
        return [Individual(c, float(s)) for c, s in zip(chromosomes, scores)]


def random_population(
    model: ArchitectureModel,
    config: GaConfig,
    rng: np.random.Generator | None = None,
    *,
    include_actors: bool = True,
) -> list[Individual]:
    """Draw ``initial_population`` feasible chromosomes and score them."""
    search = _Search(model, include_actors)
    if rng is None:
        rng = np.random.default_rng(config.seed)
    return _random_population(search, config.initial_population, rng)


def _random_population(search: _Search, size: int, rng: np.random.Generator) -> list[Individual]:
    genes = np.tile(search.template, (size, 1))
    if search.free.size:
        genes[:, search.free] = rng.choice(search.systems, size=(size, search.free.size))
    return search.individuals([Allocation._of(tuple(row)) for row in genes.tolist()])


def select_survivors(population: Sequence[Individual], survivor_pct: float) -> list[Individual]:
    """Keep the best ``ceil(survivor_pct * size)`` individuals, best first.

    Ties go to the lexicographically smaller chromosome, then to the earlier
    individual (``sorted`` is stable).
    """
    if not population:
        raise ValueError("cannot select from an empty population")
    ranked = sorted(population, key=lambda ind: ind.key)
    keep = max(1, _count(survivor_pct, len(ranked), math.ceil))
    return ranked[:keep]


def single_point(
    a: Allocation, b: Allocation, free_positions: Sequence[int], cut: int
) -> tuple[Allocation, Allocation]:
    """Swap the free genes after the first ``cut`` free positions."""
    left = list(a.assignment)
    right = list(b.assignment)
    for pos in free_positions[cut:]:
        left[pos], right[pos] = right[pos], left[pos]
    return Allocation._of(tuple(left)), Allocation._of(tuple(right))


def crossover(
    parents: Sequence[Individual],
    parent_pct: float,
    rng: np.random.Generator,
    free_positions: Sequence[int],
) -> list[Allocation]:
    """Pair up the mating pool at random; each pair yields two children.

    ``parents`` must be ordered best-first (as ``select_survivors`` returns);
    the pool is the top ``floor(parent_pct * len(parents))``.  An odd pool
    member sits out.  A pool smaller than two breeds nothing.
    """
    pool_size = _count(parent_pct, len(parents), math.floor)
    if pool_size < 2:
        return []
    shuffled = rng.permutation(pool_size).tolist()
    free_positions = list(free_positions)
    n_free = len(free_positions)
    n_pairs = pool_size // 2
    if n_free >= 2:
        cuts = rng.integers(1, n_free, size=n_pairs).tolist()
    else:
        cuts = [n_free] * n_pairs
    children: list[Allocation] = []
    for i, cut in enumerate(cuts):
        a = parents[shuffled[2 * i]].chromosome
        b = parents[shuffled[2 * i + 1]].chromosome
        children.extend(single_point(a, b, free_positions, cut))
    return children


def mutate(
    offspring: Sequence[Allocation],
    child_mutation_pct: float,
    gene_mutation_pct: float,
    rng: np.random.Generator,
    free_positions: Sequence[int],
    system_ids: Sequence[int],
) -> list[Allocation]:
    """Re-draw a fixed number of free genes in a fixed number of children.

    The new value is uniform over system components and may equal the old one.
    """
    result = list(offspring)
    n_free = len(free_positions)
    n_children = min(len(result), _count(child_mutation_pct, len(result), math.ceil))
    n_genes = min(n_free, _count(gene_mutation_pct, n_free, math.ceil))
    if n_children == 0 or n_genes == 0:
        return result
    chosen = np.sort(rng.choice(len(result), size=n_children, replace=False))
    # Distinct positions per child: the first n_genes of a random permutation.
    slots = np.argsort(rng.random((n_children, n_free)), axis=1)[:, :n_genes]
    positions = np.asarray(free_positions, dtype=np.intp)[slots]
    values = np.asarray(system_ids, dtype=np.intp)[
        rng.integers(0, len(system_ids), size=(n_children, n_genes))
    ]
    for idx, pos_row, val_row in zip(chosen.tolist(), positions.tolist(), values.tolist()):
        genes = list(result[idx].assignment)
        for pos, value in zip(pos_row, val_row):
            genes[pos] = value
        result[idx] = Allocation._of(tuple(genes))
    return result


def optimize(
    model: ArchitectureModel,
    config: GaConfig,
    *,
    include_actors: bool = True,
    observer: Callable[[int, list[Individual]], None] | None = None,
) -> RunReport:
    """Run the generational loop and return the best allocation ever seen.

    ``observer(generation, population)`` is called for the initial population
    and after every merge; it must not mutate the list.
    """
    started = time.perf_counter()
    search = _Search(model, include_actors)
    rng = np.random.default_rng(config.seed)
    free = search.free.tolist()
    systems = search.systems.tolist()

    population = _random_population(search, config.initial_population, rng)
    evaluations = len(population)
    best = min(population, key=lambda ind: ind.key)
    history = [best.fitness]
    generation = 0
    if observer is not None:
        observer(generation, population)

    while True:
        if generation >= config.max_generations:
            termination = Termination.MAX_GENERATIONS
            break
        if len(population) < MIN_POPULATION:
            termination = Termination.POPULATION_UNDERFLOW
            break
        survivors = select_survivors(population, config.survivor_pct)
        children = crossover(survivors, config.parent_pct, rng, free)
        children = mutate(
            children, config.child_mutation_pct, config.gene_mutation_pct, rng, free, systems
        )
        scored = search.individuals(children)
        evaluations += len(scored)
        population = survivors + scored

        generation_best = min(population, key=lambda ind: ind.key)
        if generation_best.key < best.key:
            best = generation_best
        elif best not in population:
            population.append(best)
        generation += 1
        history.append(best.fitness)
        if observer is not None:
            observer(generation, population)

    return RunReport(
        best=best,
        generations_run=generation,
        evaluations=evaluations,
        history=tuple(history),
        wall_time=time.perf_counter() - started,
        termination=termination,
        seed=config.seed,
    )
