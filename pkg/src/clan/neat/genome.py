"""Genome representation: node genes, connection genes and structural checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum


class GenomeError(ValueError):
    """A genome violates a structural invariant."""


class ArityError(ValueError):
    """Input vector length does not match the genome's input nodes."""


class UnevaluatedGenomeError(ValueError):
    """An operation needed a fitness value the genome does not have."""


class NodeKind(IntEnum):
    INPUT = 0
    OUTPUT = 1
    HIDDEN = 2


class Activation(IntEnum):
    SIGMOID = 0  # steepened: 1 / (1 + exp(-4.9 x))
    IDENTITY = 1
    TANH = 2
    RELU = 3

    @classmethod
    def from_name(cls, name: str) -> Activation:
        return cls[name.upper()]


@dataclass
class NodeGene:
    id: int
    kind: NodeKind
    bias: float = 0.0
    activation: Activation = Activation.SIGMOID

    def __post_init__(self) -> None:
        if self.kind == NodeKind.INPUT:
            self.bias = 0.0


@dataclass
class ConnectionGene:
    innovation_id: int
    in_node: int
    out_node: int
    weight: float
    enabled: bool = True


@dataclass
class Genome:
    genome_id: int
    nodes: dict[int, NodeGene] = field(default_factory=dict)
    connections: dict[int, ConnectionGene] = field(default_factory=dict)
    fitness: float | None = None
    adjusted_fitness: float | None = None

    def copy(self, genome_id: int | None = None) -> Genome:
        return Genome(
            genome_id=self.genome_id if genome_id is None else genome_id,
            nodes={
                k: NodeGene(n.id, n.kind, n.bias, n.activation)
                for k, n in self.nodes.items()
            },
            connections={
                k: ConnectionGene(c.innovation_id, c.in_node, c.out_node, c.weight, c.enabled)
                for k, c in self.connections.items()
            },
            fitness=self.fitness,
            adjusted_fitness=self.adjusted_fitness,
        )

    def nodes_of(self, kind: NodeKind) -> list[int]:
        return sorted(i for i, n in self.nodes.items() if n.kind == kind)

    @property
    def input_ids(self) -> list[int]:
        return self.nodes_of(NodeKind.INPUT)

    @property
    def output_ids(self) -> list[int]:
        return self.nodes_of(NodeKind.OUTPUT)

    @property
    def hidden_ids(self) -> list[int]:
        return self.nodes_of(NodeKind.HIDDEN)

    def pairs(self) -> set[tuple[int, int]]:
        return {(c.in_node, c.out_node) for c in self.connections.values()}

    def require_fitness(self) -> float:
        if self.fitness is None:
            raise UnevaluatedGenomeError(f"genome {self.genome_id} has no fitness")
        return self.fitness


def gene_count(genome: Genome) -> int:
    """Cost weight of a genome: one gene per node plus one per connection."""
    return len(genome.nodes) + len(genome.connections)


def creates_cycle(edges: set[tuple[int, int]], new_edge: tuple[int, int]) -> bool:
    """Would adding ``new_edge`` close a directed cycle over ``edges``?"""
    src, dst = new_edge
    if src == dst:
        return True
    adjacency: dict[int, list[int]] = {}
    for a, b in edges:
        adjacency.setdefault(a, []).append(b)
    # a path dst -> ... -> src means src -> dst closes a loop
    stack = [dst]
    seen = {dst}
    while stack:
        node = stack.pop()
        if node == src:
            return True
        for nxt in adjacency.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return False


def topological_order(genome: Genome, *, enabled_only: bool = True) -> list[int]:
    """Kahn ordering of node ids; ties resolved by ascending id.

    Raises GenomeError when the connection graph contains a cycle.
    """
    indegree = {nid: 0 for nid in genome.nodes}
    adjacency: dict[int, list[int]] = {nid: [] for nid in genome.nodes}
    for c in genome.connections.values():
        if enabled_only and not c.enabled:
            continue
        adjacency[c.in_node].append(c.out_node)
        indegree[c.out_node] += 1
    import heapq

    ready = [nid for nid, d in indegree.items() if d == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        nid = heapq.heappop(ready)
        order.append(nid)
        for nxt in adjacency[nid]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                heapq.heappush(ready, nxt)
    if len(order) != len(genome.nodes):
        raise GenomeError(f"genome {genome.genome_id} contains a cycle")
    return order


def validate_genome(genome: Genome) -> None:
    """Check every structural invariant; raise GenomeError on the first violation."""
    for key, node in genome.nodes.items():
        if key != node.id:
            raise GenomeError(f"node keyed {key} has id {node.id}")
        if node.kind == NodeKind.INPUT and node.bias != 0.0:
            raise GenomeError(f"input node {key} carries a bias")
    seen_pairs = set()
    for key, conn in genome.connections.items():
        if key != conn.innovation_id:
            raise GenomeError(f"connection keyed {key} has id {conn.innovation_id}")
        if conn.in_node not in genome.nodes or conn.out_node not in genome.nodes:
            raise GenomeError(f"connection {key} references a missing node")
        if genome.nodes[conn.out_node].kind == NodeKind.INPUT:
            raise GenomeError(f"connection {key} targets an input node")
        if genome.nodes[conn.in_node].kind == NodeKind.OUTPUT:
            raise GenomeError(f"connection {key} leaves an output node")
        pair = (conn.in_node, conn.out_node)
        if pair in seen_pairs:
            raise GenomeError(f"duplicate connection {pair}")
        seen_pairs.add(pair)
    # disabled genes can be re-enabled by crossover, so the whole graph must be acyclic
    topological_order(genome, enabled_only=False)
