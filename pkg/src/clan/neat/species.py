"""Speciation and explicit fitness sharing."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from clan.neat.config import NeatConfig
from clan.neat.cost import GeneOps, tally
from clan.neat.genome import Genome, UnevaluatedGenomeError


@dataclass
class Species:
    species_id: int
    representative: Genome
    members: list[int] = field(default_factory=list)
    best_fitness_history: list[float] = field(default_factory=list)
    age: int = 0

    def best_ever(self) -> float:
        return max(self.best_fitness_history, default=float("-inf"))


def compatibility_distance(a: Genome, b: Genome, config: NeatConfig, ops: GeneOps | None = None) -> float:
    """c1*E/N + c2*D/N + c3*mean|dw| over connection genes aligned by innovation id."""
    ca, cb = a.connections, b.connections
    tally(ops, len(ca) + len(cb))
    if not ca and not cb:
        return 0.0
    max_a = max(ca, default=-1)
    max_b = max(cb, default=-1)
    excess = disjoint = matching = 0
    weight_diff = 0.0
    for innov, conn in ca.items():
        other = cb.get(innov)
        if other is not None:
            matching += 1
            weight_diff += abs(conn.weight - other.weight)
        elif innov > max_b:
            excess += 1
        else:
            disjoint += 1
    for innov in cb:
        if innov not in ca:
            if innov > max_a:
                excess += 1
            else:
                disjoint += 1
    n = max(len(ca), len(cb), 1)
    mean_diff = weight_diff / matching if matching else 0.0
    return config.c1 * excess / n + config.c2 * disjoint / n + config.c3 * mean_diff


def speciate(
    population: list[Genome],
    previous_species: list[Species],
    config: NeatConfig,
    next_species_id: int,
    ops: GeneOps | None = None,
) -> tuple[list[Species], int]:
    """Assign every genome to the first species (ascending id) whose
    representative is within the compatibility threshold.

    Returns the surviving species and the next unused species id. Survivors
    keep their history; their representative becomes the member closest to
    the old representative.
    """
    if not population:
        raise ValueError("cannot speciate an empty population")
    pool = [
        Species(s.species_id, s.representative, [], list(s.best_fitness_history), s.age + 1)
        for s in sorted(previous_species, key=lambda s: s.species_id)
    ]
    for genome in population:
        for sp in pool:
            if compatibility_distance(genome, sp.representative, config, ops) < config.compatibility_threshold:
                sp.members.append(genome.genome_id)
                break
        else:
            pool.append(Species(next_species_id, genome, [genome.genome_id]))
            next_species_id += 1

    by_id = {g.genome_id: g for g in population}
    survivors = []
    for sp in pool:
        if not sp.members:
            continue
        if sp.age > 0:
            old_rep = sp.representative
            best = None
            for gid in sorted(sp.members):
                d = compatibility_distance(by_id[gid], old_rep, config, ops)
                if best is None or d < best[0]:
                    best = (d, gid)
            sp.representative = by_id[best[1]]
        survivors.append(sp)
    return survivors, next_species_id


def share_fitness(species: Iterable[Species], population: Mapping[int, Genome]) -> None:
    """adjusted = raw / |species| for every member."""
    for sp in species:
        size = len(sp.members)
        for gid in sp.members:
            genome = population[gid]
            if genome.fitness is None:
                raise UnevaluatedGenomeError(f"genome {gid} has no fitness")
            genome.adjusted_fitness = genome.fitness / size


def record_species_fitness(species: Iterable[Species], population: Mapping[int, Genome]) -> None:
    for sp in species:
        sp.best_fitness_history.append(max(population[g].require_fitness() for g in sp.members))
