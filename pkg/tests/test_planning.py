from __future__ import annotations

import pytest
from conftest import make_genome

from clan.neat.config import NeatConfig
from clan.neat.planning import (
    TotalExtinctionError,
    assign_work,
    is_stagnant,
    largest_remainder,
    plan_generation,
)
from clan.neat.species import Species, share_fitness


def _species(sid, fits, start):
    pop = {start + i: make_genome(start + i, fitness=f) for i, f in enumerate(fits)}
    return Species(sid, pop[start], list(pop)), pop


def _plan(groups, size, **kw):
    pop = {}
    species = []
    start = 0
    for sid, fits in groups:
        sp, p = _species(sid, fits, start)
        start += len(fits)
        species.append(sp)
        pop.update(p)
    share_fitness(species, pop)
    for sp in species:
        sp.best_fitness_history.append(max(pop[g].fitness for g in sp.members))
    return plan_generation(species, pop, NeatConfig(population_size=size, **kw))


def test_single_species_takes_all():
    assert _plan([(4, [1.0, 2.0, 3.0])], 150).spawn_counts == {4: 150}


def test_proportional_75_25():
    # adjusted-fitness sums: 3.0 and 1.0
    plan = _plan([(0, [3.0]), (1, [1.0, 1.0])], 100)
    assert plan.spawn_counts == {0: 75, 1: 25}


def test_tie_goes_to_lower_species_id():
    plan = _plan([(5, [1.0]), (9, [1.0])], 151)
    assert plan.spawn_counts == {5: 76, 9: 75}


def test_largest_remainder_conserves_total():
    counts = largest_remainder({1: 0.3, 2: 0.3, 3: 0.4}, 10)
    assert sum(counts.values()) == 10 and counts == {1: 3, 2: 3, 3: 4}


def test_zero_scores_split_evenly():
    assert largest_remainder({1: 0.0, 2: 0.0}, 5) == {1: 3, 2: 2}


def test_negative_fitness_still_allocates():
    plan = _plan([(0, [-200.0]), (1, [-150.0])], 10)
    assert sum(plan.spawn_counts.values()) == 10
    assert plan.spawn_counts[1] > plan.spawn_counts[0]


def test_minimum_elitism_slots():
    plan = _plan([(0, [1000.0]), (1, [0.001])], 50, elitism_per_species=2)
    assert plan.spawn_counts[1] >= 2 and sum(plan.spawn_counts.values()) == 50


def test_stagnation():
    sp = Species(0, make_genome(), [], [5, 6, 7, 7, 7, 7])
    assert is_stagnant(sp, 3) and not is_stagnant(sp, 4) and not is_stagnant(sp, 6)


def test_stagnant_species_culled_but_not_all():
    a, pa = _species(0, [5.0], 0)
    b, pb = _species(1, [1.0], 1)
    a.best_fitness_history = [9, 1, 1]
    b.best_fitness_history = [1, 2, 3]
    pop = {**pa, **pb}
    share_fitness([a, b], pop)
    plan = plan_generation([a, b], pop, NeatConfig(population_size=10, stagnation_limit=2))
    assert plan.culled == [0] and plan.spawn_counts == {1: 10}
    b.best_fitness_history = [9, 1, 1]
    plan = plan_generation([a, b], pop, NeatConfig(population_size=10, stagnation_limit=2))
    assert plan.culled == [1] and plan.spawn_counts == {0: 10}


def test_no_species_is_extinction():
    with pytest.raises(TotalExtinctionError):
        plan_generation([], {}, NeatConfig())


def test_work_items_layout():
    plan = _plan([(0, [3.0, 2.0, 1.0]), (1, [1.0])], 10)
    items, nxt = assign_work(plan, seed=1, clan_id=0, generation=0, first_genome_id=100)
    assert [i.child_index for i in items] == list(range(10))
    assert sum(i.elite for i in items) == sum(len(e) for e in plan.elites.values())
    fresh = [i for i in items if not i.elite]
    assert [i.genome_id for i in fresh] == list(range(100, 100 + len(fresh))) and nxt == 100 + len(fresh)
    again, _ = assign_work(plan, seed=1, clan_id=0, generation=0, first_genome_id=100)
    assert again == items
