"""Learning measure densities with a real-coded genetic algorithm.

Chromosomes are candidate singleton-density vectors, clamped into
[1e-6, 1 - 1e-6] so every candidate yields a well-formed lambda-measure.
Fitness is the equal error rate of Choquet-fused scores on a labeled
client/impostor set, to be minimized.  One generation:

1. uniform parent selection (probability 1/N each, no replacement within
   a pair);
2. linear crossover producing three offspring per pair:
   0.5*(C1 + C2), 1.5*C1 - 0.5*C2, 0.5*C1 + 1.5*C2;
3. non-uniform mutation: each gene moves by +-y * (1 - s)^(g / g_max)
   with s ~ U[0, 1], so the expected step anneals as generations advance;
4. survivor selection pools parents with offspring and keeps the best N
   (with the configured number of elites always retained), which makes
   the best-fitness trace monotone.

Random streams are partitioned per generation and per offspring from the
master seed, so results are reproducible and independent of evaluation
order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .aggregate import choquet_fuse_batch
from .measures import LambdaMeasure
from .metrics import LabeledScoreSet, _crossing, _curves, _threshold_grid, eer

__all__ = [
    "Chromosome",
    "GENE_EPS",
    "GaConfig",
    "GenerationRecord",
    "Population",
    "evolve",
    "fitness",
    "init_population",
    "linear_crossover",
    "mutation_offsets",
    "nonuniform_mutation",
    "select_parents",
]

# Genes are clamped into [GENE_EPS, 1 - GENE_EPS]: exact 0/1 densities are
# rejected by the measure layer (vacuous resp. degenerate criteria).
GENE_EPS = 1e-6


def _clamp(genes: np.ndarray) -> np.ndarray:
    return np.clip(genes, GENE_EPS, 1.0 - GENE_EPS)


@dataclass
class Chromosome:
    """A candidate density vector with its cached fitness (EER), if known."""

    genes: tuple[float, ...]
    fitness: float | None = None

    def __post_init__(self):
        self.genes = tuple(float(g) for g in self.genes)
        if any(not GENE_EPS <= g <= 1.0 - GENE_EPS for g in self.genes):
            raise ValueError(f"genes outside [{GENE_EPS}, {1.0 - GENE_EPS}]: {self.genes}")


@dataclass
class Population:
    """Fixed-size list of chromosomes plus the generation counter."""

    members: list[Chromosome]
    generation: int = 0

    def __post_init__(self):
        if len(self.members) < 2:
            raise ValueError("population needs at least 2 members")

    def best(self) -> Chromosome:
        return min(
            (c for c in self.members if c.fitness is not None),
            key=lambda c: c.fitness,
        )


@dataclass(frozen=True)
class GaConfig:
    """Run parameters for the measure optimizer.

    ``offspring_per_generation`` defaults to the population size; crossover
    events each yield three offspring, so ceil(offspring / 3) events run and
    the surplus is truncated.  ``mutation_bound`` is the upper bound y of
    the per-gene perturbation; the default is the gene-domain half-width,
    which leaves the annealed steps small enough for late-run refinement
    (at the full domain width the expected step never drops below half the
    domain and the search degenerates to corner sampling).
    """

    population_size: int = 30
    max_generations: int = 1000
    eer_stop_threshold: float = 0.04
    mutation_bound: float = 0.5
    rng_seed: int = 0
    offspring_per_generation: int | None = None
    elitism_count: int = 1

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if self.max_generations < 1:
            raise ValueError("max_generations must be at least 1")
        if not 0.0 <= self.eer_stop_threshold <= 1.0:
            raise ValueError("eer_stop_threshold must lie in [0, 1]")
        if self.mutation_bound <= 0.0:
            raise ValueError("mutation_bound must be positive")
        if self.offspring_per_generation is not None and self.offspring_per_generation < 1:
            raise ValueError("offspring_per_generation must be positive")
        if not 0 <= self.elitism_count <= self.population_size:
            raise ValueError("elitism_count must lie in [0, population_size]")

    @property
    def offspring_count(self) -> int:
        return self.offspring_per_generation or self.population_size


@dataclass(frozen=True)
class GenerationRecord:
    """Best-so-far fitness after one generation, for convergence traces."""

    generation: int
    best_eer: float
    best_genes: tuple[float, ...]


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def init_population(
    cfg: GaConfig,
    n_genes: int,
    seeds: Sequence[Iterable[float]] | None = None,
) -> Population:
    """Seeded members first (expert picks), the rest uniform random."""
    if n_genes < 2:
        raise ValueError("need at least 2 genes per chromosome")
    seeded = [Chromosome(tuple(_clamp(np.asarray(s, dtype=float)))) for s in (seeds or [])]
    if len(seeded) > cfg.population_size:
        raise ValueError(
            f"{len(seeded)} seeds exceed the population size {cfg.population_size}"
        )
    rng = _rng(cfg.rng_seed, 0, 0)
    members = seeded + [
        Chromosome(tuple(rng.uniform(GENE_EPS, 1.0 - GENE_EPS, size=n_genes)))
        for _ in range(cfg.population_size - len(seeded))
    ]
    return Population(members=members, generation=0)


def _score_of_genes(
    genes: tuple[float, ...],
    client_scores: np.ndarray,
    impostor_scores: np.ndarray,
) -> tuple[float, float]:
    """(EER, minimum sweep error) of Choquet fusion under ``genes``.

    The EER is the fitness proper.  The minimum total error over the
    threshold sweep only orders chromosomes whose EERs tie: the EER
    estimator is quantized at half error counts, so whole plateaus of
    measures share one fitness value while differing in the error rate
    they can actually operate at.
    """
    measure = LambdaMeasure(genes)
    fused_clients = choquet_fuse_batch(client_scores, measure)
    fused_impostors = choquet_fuse_batch(impostor_scores, measure)
    if fused_clients.min() > fused_impostors.max():
        return 0.0, 0.0
    grid = _threshold_grid(fused_clients, fused_impostors)
    far, frr = _curves(fused_clients, fused_impostors, grid)
    eer_value, _ = _crossing(grid, far, frr)
    counts = np.rint(far * fused_impostors.size + frr * fused_clients.size)
    min_error = float(counts.min()) / (fused_clients.size + fused_impostors.size)
    return eer_value, min_error


def fitness(chromosome: Chromosome, data: LabeledScoreSet) -> float:
    """EER of Choquet fusion under the chromosome's densities (cached)."""
    if chromosome.fitness is None:
        measure = LambdaMeasure(chromosome.genes)
        chromosome.fitness = eer(
            choquet_fuse_batch(data.client_scores, measure),
            choquet_fuse_batch(data.impostor_scores, measure),
        )[0]
    return chromosome.fitness


def select_parents(
    population: Population | Sequence[Chromosome],
    rng: np.random.Generator,
) -> tuple[Chromosome, Chromosome]:
    """Two members drawn uniformly (1/N each), distinct within the pair."""
    members = population.members if isinstance(population, Population) else population
    i, j = rng.choice(len(members), size=2, replace=False)
    return members[int(i)], members[int(j)]


def linear_crossover(
    parent_a: Chromosome, parent_b: Chromosome
) -> tuple[Chromosome, Chromosome, Chromosome]:
    """Componentwise linear recombination, clamped back into the gene box."""
    a = np.asarray(parent_a.genes)
    b = np.asarray(parent_b.genes)
    if a.shape != b.shape:
        raise ValueError(f"gene length mismatch: {a.shape} vs {b.shape}")
    return (
        Chromosome(tuple(_clamp(0.5 * (a + b)))),
        Chromosome(tuple(_clamp(1.5 * a - 0.5 * b))),
        Chromosome(tuple(_clamp(0.5 * a + 1.5 * b))),
    )


def mutation_offsets(
    n_genes: int,
    generation: int,
    cfg: GaConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Signed pre-clamp perturbations: +-y * (1 - s)^(generation / g_max).

    Per gene, independently: s ~ U[0, 1] and a fair-coin sign.  The expected
    magnitude is y / (1 + generation / g_max), shrinking as the run ages.
    """
    if not 0 <= generation <= cfg.max_generations:
        raise ValueError("generation must lie in [0, max_generations]")
    s = rng.random(n_genes)
    signs = rng.integers(0, 2, size=n_genes) * 2 - 1
    exponent = generation / cfg.max_generations
    return signs * cfg.mutation_bound * (1.0 - s) ** exponent


def nonuniform_mutation(
    chromosome: Chromosome,
    generation: int,
    cfg: GaConfig,
    rng: np.random.Generator,
) -> Chromosome:
    """Perturb every gene by an annealed random step, clamped to the box."""
    genes = np.asarray(chromosome.genes)
    offsets = mutation_offsets(genes.size, generation, cfg, rng)
    return Chromosome(tuple(_clamp(genes + offsets)))


def _next_population(
    current: list[Chromosome],
    offspring: list[Chromosome],
    cfg: GaConfig,
    key: Callable[[Chromosome], tuple],
) -> list[Chromosome]:
    elites = sorted(current, key=key)[: cfg.elitism_count]
    elite_ids = {id(c) for c in elites}
    rest = [c for c in current + offspring if id(c) not in elite_ids]
    rest.sort(key=key)
    survivors = elites + rest[: cfg.population_size - len(elites)]
    survivors.sort(key=key)
    return survivors


def evolve(
    data: LabeledScoreSet,
    cfg: GaConfig | None = None,
    seeds: Sequence[Iterable[float]] | None = None,
    on_generation: Callable[[Population, Chromosome], None] | None = None,
) -> tuple[Chromosome, list[GenerationRecord]]:
    """Run the generational loop; returns the best chromosome and its trace.

    Stops as soon as the best EER reaches ``cfg.eer_stop_threshold`` or
    after ``cfg.max_generations`` generations.  Fully deterministic for a
    fixed ``cfg.rng_seed``.
    """
    cfg = cfg or GaConfig()
    clients, impostors = data.client_scores, data.impostor_scores

    # (EER, min sweep error) per distinct gene vector; boundary clamping
    # makes duplicate offspring common, so memoizing saves many evaluations.
    memo: dict[tuple[float, ...], tuple[float, float]] = {}

    def evaluate(members: list[Chromosome]) -> None:
        for c in members:
            scores = memo.get(c.genes)
            if scores is None:
                scores = _score_of_genes(c.genes, clients, impostors)
                memo[c.genes] = scores
            c.fitness = scores[0]

    def rank(c: Chromosome) -> tuple[float, float]:
        return memo[c.genes]

    population = init_population(cfg, n_genes=data.n_modalities, seeds=seeds)
    evaluate(population.members)
    best = min(population.members, key=rank)
    history = [GenerationRecord(0, best.fitness, best.genes)]
    if on_generation is not None:
        on_generation(population, best)

    events = math.ceil(cfg.offspring_count / 3)
    for generation in range(1, cfg.max_generations + 1):
        if best.fitness <= cfg.eer_stop_threshold:
            break
        selection_rng = _rng(cfg.rng_seed, generation, 0)
        offspring: list[Chromosome] = []
        for _ in range(events):
            parent_a, parent_b = select_parents(population, selection_rng)
            offspring.extend(linear_crossover(parent_a, parent_b))
        offspring = offspring[: cfg.offspring_count]
        offspring = [
            nonuniform_mutation(child, generation, cfg, _rng(cfg.rng_seed, generation, k + 1))
            for k, child in enumerate(offspring)
        ]
        evaluate(offspring)
        population = Population(
            members=_next_population(population.members, offspring, cfg, rank),
            generation=generation,
        )
        best = population.members[0]
        history.append(GenerationRecord(generation, best.fitness, best.genes))
        if on_generation is not None:
            on_generation(population, best)
    return replace(best), history
