from __future__ import annotations

import pytest

from clan.neat.genome import Activation, ConnectionGene, Genome, NodeGene, NodeKind


def make_genome(genome_id=1, inputs=(0, 1), outputs=(2,), hidden=(), conns=(), act=Activation.SIGMOID, fitness=None):
    """conns: (innovation, in, out, weight[, enabled]) tuples."""
    nodes = {i: NodeGene(i, NodeKind.INPUT, 0.0, act) for i in inputs}
    nodes.update({i: NodeGene(i, NodeKind.OUTPUT, 0.0, act) for i in outputs})
    nodes.update({i: NodeGene(i, NodeKind.HIDDEN, 0.0, act) for i in hidden})
    connections = {}
    for c in conns:
        innov, a, b, w, *rest = c
        connections[innov] = ConnectionGene(innov, a, b, w, rest[0] if rest else True)
    return Genome(genome_id, nodes, connections, fitness)


@pytest.fixture
def genome_factory():
    return make_genome
