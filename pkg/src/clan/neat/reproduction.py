"""Crossover, the five mutation operators, and per-child breeding."""

from __future__ import annotations

from typing import Mapping

import numpy as np

from clan.neat import rng as rngs
from clan.neat.config import NeatConfig
from clan.neat.cost import GeneOps, tally
from clan.neat.genome import ConnectionGene, Genome, NodeGene, NodeKind, gene_count
from clan.neat.innovation import CONN, NODE, InnovationTracker
from clan.neat.planning import WorkItem


def crossover(
    parent_a: Genome, parent_b: Genome, rng: np.random.Generator, ops: GeneOps | None = None
) -> Genome:
    """Child keeps the fitter parent's structure (parent_a on ties); matching
    genes take weight and enabled flag from either parent with equal odds."""
    fa, fb = parent_a.require_fitness(), parent_b.require_fitness()
    fitter, other = (parent_a, parent_b) if fa >= fb else (parent_b, parent_a)
    tally(ops, gene_count(parent_a) + gene_count(parent_b))

    connections = {}
    for innov in sorted(fitter.connections):
        gene = fitter.connections[innov]
        twin = other.connections.get(innov)
        source = gene
        if twin is not None and rng.random() >= 0.5:
            source = twin
        connections[innov] = ConnectionGene(innov, gene.in_node, gene.out_node, source.weight, source.enabled)
    nodes = {
        nid: NodeGene(n.id, n.kind, n.bias, n.activation)
        for nid, n in sorted(fitter.nodes.items())
    }
    return Genome(fitter.genome_id, nodes, connections)


def _clamp(w: float, config: NeatConfig) -> float:
    return min(config.weight_max, max(config.weight_min, w))


def _perturb(value: float, config: NeatConfig, rng: np.random.Generator) -> float:
    r = rng.random()
    if r < config.p_replace_weight:
        return float(rng.uniform(config.weight_min, config.weight_max))
    if r < config.p_replace_weight + config.p_perturb:
        return _clamp(value + float(rng.normal(0.0, config.perturb_sigma)), config)
    return value


def _descendants(genome: Genome, start: int) -> set[int]:
    adjacency: dict[int, list[int]] = {}
    for c in genome.connections.values():
        adjacency.setdefault(c.in_node, []).append(c.out_node)
    seen = {start}
    stack = [start]
    while stack:
        for nxt in adjacency.get(stack.pop(), ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def connection_candidates(genome: Genome) -> list[tuple[int, int]]:
    """Ordered pairs that may receive a new connection without breaking any
    invariant (no duplicates, no input targets, no output sources, no cycles
    over the full connection graph)."""
    sources = [i for i in sorted(genome.nodes) if genome.nodes[i].kind != NodeKind.OUTPUT]
    targets = [i for i in sorted(genome.nodes) if genome.nodes[i].kind != NodeKind.INPUT]
    existing = genome.pairs()
    out = []
    for b in targets:
        reach = _descendants(genome, b)
        for a in sources:
            if a != b and (a, b) not in existing and a not in reach:
                out.append((a, b))
    out.sort()
    return out


def mutate(
    genome: Genome,
    config: NeatConfig,
    innovations: InnovationTracker,
    rng: np.random.Generator,
    ops: GeneOps | None = None,
) -> Genome:
    child = genome.copy()
    mutate_in_place(child, config, innovations, rng, ops)
    return child


def mutate_in_place(
    g: Genome,
    config: NeatConfig,
    innovations: InnovationTracker,
    rng: np.random.Generator,
    ops: GeneOps | None = None,
) -> None:
    # Perturbation and deletions run before any gene is added, so they only
    # ever see inherited ids; see clan.neat.innovation for why that matters.
    tally(ops, gene_count(g))
    for innov in sorted(g.connections):
        conn = g.connections[innov]
        conn.weight = _perturb(conn.weight, config, rng)
    for nid in sorted(g.nodes):
        node = g.nodes[nid]
        if node.kind != NodeKind.INPUT:
            node.bias = _perturb(node.bias, config, rng)

    if rng.random() < config.p_del_conn and g.connections:
        keys = sorted(g.connections)
        del g.connections[keys[int(rng.integers(len(keys)))]]

    if rng.random() < config.p_del_node:
        hidden = g.hidden_ids
        if hidden:
            victim = hidden[int(rng.integers(len(hidden)))]
            del g.nodes[victim]
            for innov in [k for k, c in g.connections.items() if victim in (c.in_node, c.out_node)]:
                del g.connections[innov]

    if rng.random() < config.p_add_conn:
        candidates = connection_candidates(g)
        if candidates:
            a, b = candidates[int(rng.integers(len(candidates)))]
            weight = _clamp(float(rng.normal(0.0, config.init_weight_sigma)), config)
            innov = innovations.next_innovation(CONN, (a, b))
            if innov not in g.connections:
                g.connections[innov] = ConnectionGene(innov, a, b, weight, True)

    if rng.random() < config.p_add_node:
        enabled = [k for k in sorted(g.connections) if g.connections[k].enabled]
        if enabled:
            split = g.connections[enabled[int(rng.integers(len(enabled)))]]
            nid = innovations.next_innovation(NODE, split.innovation_id)
            if nid not in g.nodes:
                first = innovations.next_innovation(CONN, (split.in_node, nid))
                second = innovations.next_innovation(CONN, (nid, split.out_node))
                g.nodes[nid] = NodeGene(nid, NodeKind.HIDDEN, 0.0, config.activation_tag)
                g.connections[first] = ConnectionGene(first, split.in_node, nid, 1.0, True)
                g.connections[second] = ConnectionGene(second, nid, split.out_node, split.weight, True)
                split.enabled = False


def breed_child(
    item: WorkItem,
    parents: Mapping[int, Genome],
    config: NeatConfig,
    innovations: InnovationTracker,
    *,
    seed: int,
    clan_id: int,
    generation: int,
    ops: GeneOps | None = None,
) -> Genome:
    if item.elite:
        elite = parents[item.genome_id].copy()
        elite.fitness = elite.adjusted_fitness = None
        tally(ops, gene_count(elite))
        return elite
    r = rngs.stream(seed, rngs.BREED, clan_id, generation, item.child_index)
    child = crossover(parents[item.parent_a], parents[item.parent_b], r, ops)
    child.genome_id = item.genome_id
    mutate_in_place(child, config, innovations, r, ops)
    return child
