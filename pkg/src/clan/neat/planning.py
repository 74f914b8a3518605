"""Generation planning: stagnation culling, spawn counts, parent pools, work items."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from clan.neat import rng as rngs
from clan.neat.config import NeatConfig
from clan.neat.genome import Genome
from clan.neat.species import Species


class TotalExtinctionError(RuntimeError):
    """No species is left to reproduce."""


@dataclass
class GenerationPlan:
    spawn_counts: dict[int, int] = field(default_factory=dict)
    parent_pools: dict[int, list[int]] = field(default_factory=dict)
    elites: dict[int, list[int]] = field(default_factory=dict)
    culled: list[int] = field(default_factory=list)


@dataclass(frozen=True)
class WorkItem:
    child_index: int
    genome_id: int
    parent_a: int
    parent_b: int
    elite: bool = False


def is_stagnant(sp: Species, limit: int) -> bool:
    hist = sp.best_fitness_history
    if len(hist) <= limit:
        return False
    return max(hist[-limit:]) <= max(hist[:-limit])


def _ranked(sp: Species, population: Mapping[int, Genome]) -> list[int]:
    return sorted(sp.members, key=lambda gid: (-population[gid].require_fitness(), gid))


def largest_remainder(scores: dict[int, float], total: int) -> dict[int, int]:
    """Split ``total`` proportionally to ``scores``; leftover units go to the
    largest fractional parts, ties to the lower key."""
    weight = sum(scores.values())
    if weight <= 0:
        quotas = {k: total / len(scores) for k in scores}
    else:
        quotas = {k: total * v / weight for k, v in scores.items()}
    counts = {k: math.floor(q) for k, q in quotas.items()}
    leftover = total - sum(counts.values())
    order = sorted(scores, key=lambda k: (-(quotas[k] - counts[k]), k))
    for k in order[:leftover]:
        counts[k] += 1
    return counts


def plan_generation(
    species: list[Species], population: Mapping[int, Genome], config: NeatConfig
) -> GenerationPlan:
    if not species:
        raise TotalExtinctionError("no species to plan for")
    species = sorted(species, key=lambda s: s.species_id)
    keep = [s for s in species if not is_stagnant(s, config.stagnation_limit)]
    if not keep:
        # never cull the last lineage: keep the historically best stagnant species
        keep = [min(species, key=lambda s: (-s.best_ever(), s.species_id))]
    kept = {s.species_id for s in keep}
    culled = [s.species_id for s in species if s.species_id not in kept]

    raw = [population[g].require_fitness() for s in keep for g in s.members]
    floor = min(raw)
    scores = {}
    for s in keep:
        adjusted = sum(population[g].adjusted_fitness for g in s.members)
        # adjusted sum == species mean; shift so negative-reward tasks still allocate
        scores[s.species_id] = adjusted - floor if floor < 0 else adjusted

    counts = largest_remainder(scores, config.population_size)
    minimum = min(config.elitism_per_species, config.population_size // len(keep))
    for sid in sorted(counts):
        while counts[sid] < minimum:
            donor = max(
                (k for k in counts if counts[k] > minimum), key=lambda k: (counts[k], k)
            )
            counts[donor] -= 1
            counts[sid] += 1

    plan = GenerationPlan(culled=culled)
    for s in keep:
        ranked = _ranked(s, population)
        spawn = counts[s.species_id]
        plan.spawn_counts[s.species_id] = spawn
        pool_size = max(1, math.ceil(config.survival_threshold * len(ranked)))
        plan.parent_pools[s.species_id] = ranked[:pool_size]
        plan.elites[s.species_id] = ranked[: min(config.elitism_per_species, len(ranked), spawn)]
    return plan


def assign_work(
    plan: GenerationPlan,
    *,
    seed: int,
    clan_id: int,
    generation: int,
    first_genome_id: int,
) -> tuple[list[WorkItem], int]:
    """Lay children out in ascending species id, elites first, and pick parent
    pairs from each child's own selection stream."""
    items = []
    next_id = first_genome_id
    child_index = 0
    for sid in sorted(plan.spawn_counts):
        spawn = plan.spawn_counts[sid]
        elites = plan.elites[sid][:spawn]
        for gid in elites:
            items.append(WorkItem(child_index, gid, gid, gid, elite=True))
            child_index += 1
        pool = plan.parent_pools[sid]
        for _ in range(spawn - len(elites)):
            r = rngs.stream(seed, rngs.SELECT, clan_id, generation, child_index)
            a = pool[int(r.integers(len(pool)))]
            b = pool[int(r.integers(len(pool)))]
            items.append(WorkItem(child_index, next_id, a, b))
            next_id += 1
            child_index += 1
    return items, next_id
