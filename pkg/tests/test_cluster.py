from __future__ import annotations

from dataclasses import replace

import pytest

from clan.cluster import RunSettings, Topology, TopologyKind, clan_sizes, round_robin, run_experiment
from clan.cluster.nodes import evaluate_all, new_population
from clan.cluster.topology import clan_owner
from clan.envs import EvalMode, cartpole, synthetic_workload
from clan.metrics.report import generation_report
from clan.neat.config import NeatConfig
from clan.neat.serialize import genome_to_bytes
from clan.transport.message import CATEGORIES

NO_STOP = replace(cartpole(), solved_threshold=float("inf"))
SMALL_SYN = synthetic_workload(obs_dim=8, steps=5, solved_threshold=float("inf"))


def _pop_bytes(pop):
    return [(genome_to_bytes(g), g.fitness) for g in pop.genomes]


def test_round_robin_shards():
    shards = round_robin(list(range(150)), 4)
    assert [len(s) for s in shards] == [38, 38, 37, 37]
    assert sorted(x for s in shards for x in s) == list(range(150))


def test_clan_sizes_and_owners():
    assert clan_sizes(150, 5) == [30] * 5
    assert clan_sizes(10, 3) == [4, 3, 3]
    with pytest.raises(ValueError):
        clan_sizes(150, 200)
    assert [clan_owner(c, 2) for c in range(4)] == [1, 2, 1, 2]


def test_topology_parsing():
    assert Topology("CLAN_DDS", 3).kind == TopologyKind.DDS
    assert Topology("dda", 3).clans == 3 and Topology("dda", 3, 7).clans == 7 and Topology("dcs", 3, 7).clans == 1
    with pytest.raises(ValueError):
        Topology("ring")
    with pytest.raises(ValueError):
        Topology("dcs", 0)


@pytest.mark.parametrize("top", [Topology("dcs", 1), Topology("dds", 1), Topology("dda", 1), Topology("dcs", 3),
                                 Topology("dds", 3)])
def test_degenerate_and_sharded_runs_match_serial(top):
    serial = run_experiment(Topology("serial"), SMALL_SYN, NeatConfig(population_size=40), max_generations=6, seed=9)
    other = run_experiment(top, SMALL_SYN, NeatConfig(population_size=40), max_generations=6, seed=9)
    assert other.best_fitness_sequence == serial.best_fitness_sequence
    if top.kind == TopologyKind.DDA:
        assert _pop_bytes(other.clans[0]) == _pop_bytes(serial.population)
    else:
        assert _pop_bytes(other.population) == _pop_bytes(serial.population)


def test_max_generations_zero():
    for kind in ("serial", "dcs", "dda"):
        state = run_experiment(Topology(kind, 2), cartpole(), NeatConfig(), max_generations=0)
        assert state.records == [] and not state.converged
        assert state.cost_ledger.total("inference_gene_ops") == 0


def test_converges_and_stops_early():
    state = run_experiment(Topology("dcs", 2), cartpole(), NeatConfig(), max_generations=50, seed=1)
    assert state.converged and state.converged_generation == len(state.records) - 1
    assert state.best_fitness >= 195


def test_invalid_inputs():
    with pytest.raises(ValueError):
        run_experiment(Topology("dda", 200), cartpole(), NeatConfig(), max_generations=1)
    with pytest.raises(ValueError):
        run_experiment(Topology("serial"), cartpole(), NeatConfig(population_size=1), max_generations=1)


def test_dda_sends_genomes_only_at_start():
    state = run_experiment(Topology("dda", 3, 5), SMALL_SYN, NeatConfig(population_size=60), max_generations=6)
    ledger = state.cost_ledger
    assert ledger.genome_genes_sent(0) > 0
    assert [ledger.genome_genes_sent(g) for g in range(1, 6)] == [0] * 5
    assert [r.clans_reported for r in state.records] == [5] * 6


def test_dda_clan_isolation():
    """A clan evolves exactly as it would alone: independent of agents and sibling clans."""
    cfg = NeatConfig(population_size=50)
    gens = 6
    runs = [run_experiment(Topology("dda", agents, 5), SMALL_SYN, cfg, max_generations=gens, seed=4)
            for agents in (1, 2, 5)]
    settings = RunSettings(SMALL_SYN, cfg, EvalMode.MULTI_STEP, gens, 4, None)
    for c, size in enumerate(clan_sizes(50, 5)):
        alone = new_population(settings, clan_id=c, size=size)
        for g in range(gens):
            if g > 0:
                alone.step()
            for gid, f in evaluate_all(settings, alone.genomes, g)[0]:
                alone.by_id[gid].fitness = f
        for state in runs:
            assert _pop_bytes(state.clans[c]) == _pop_bytes(alone)


def test_ledger_completeness():
    state = run_experiment(Topology("dds", 3), SMALL_SYN, NeatConfig(population_size=40), max_generations=4,
                           audit=True)
    ledger = state.cost_ledger
    for g in ledger.generations:
        by_category = sum(ledger.total(f"sent_{c}", g) for c in CATEGORIES)
        assert by_category == ledger.genes_communicated(g)
        assert ledger.total("messages_sent", g) == ledger.total("messages_received", g)
        per_node = sum(ledger.node_view(n).total("cost_bytes_sent", g) for n in ledger.nodes)
        assert per_node == ledger.global_row(g)["cost_bytes_sent"]
    assert sum(e.amount for e in ledger.trail if e.counter == "genes_sent") == ledger.total("genes_sent")


def test_communication_ordering_small():
    cfg = NeatConfig(population_size=60)
    genes = {
        kind: run_experiment(Topology(kind, 4), SMALL_SYN, cfg, max_generations=5).cost_ledger
        for kind in ("dda", "dcs", "dds")
    }
    for g in range(1, 5):
        assert genes["dda"].genes_communicated(g) < genes["dcs"].genes_communicated(g) < genes["dds"].genes_communicated(g)


def test_inference_dominates_multi_step():
    state = run_experiment(Topology("serial"), synthetic_workload(obs_dim=32, steps=200, solved_threshold=float("inf")),
                           NeatConfig(population_size=30), max_generations=3)
    for g in (1, 2):
        assert generation_report(state.cost_ledger, g)["inference_evolution_ratio"] >= 10


def test_runs_are_deterministic():
    a = run_experiment(Topology("dds", 2), NO_STOP, NeatConfig(), max_generations=3, seed=5)
    b = run_experiment(Topology("dds", 2), NO_STOP, NeatConfig(), max_generations=3, seed=5)
    assert a.cost_ledger.records() == b.cost_ledger.records() and a.sim_time == b.sim_time
    c = run_experiment(Topology("dds", 2), NO_STOP, NeatConfig(), max_generations=3, seed=6)
    assert _pop_bytes(c.population) != _pop_bytes(a.population)
