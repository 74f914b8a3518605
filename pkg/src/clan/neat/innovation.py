"""Innovation numbering shared by node and connection genes.

One counter feeds both gene kinds. Identical structural mutations within a
generation are memoized so crossover can align them later.

Distributed reproduction breeds children away from the tracker that owns the
namespace. Such children draw ids from a ``ProvisionalTracker`` and are
rewritten afterwards with :func:`canonicalize`, which replays their innovation
log against the real tracker in child order. Replaying in the same order the
serial loop would have issued the requests yields the same ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable

from clan.neat.genome import ConnectionGene, Genome, NodeGene

NAMESPACE_BITS = 24
NAMESPACE_SIZE = 1 << NAMESPACE_BITS
# top of the 32-bit id space, unreachable by any namespace below 255
PROVISIONAL_BASE = 0xFFFF0000


class NamespaceExhausted(RuntimeError):
    pass


NODE = "node"
CONN = "conn"


def namespace_base(clan_id: int) -> int:
    return clan_id * NAMESPACE_SIZE


@dataclass
class InnovationRecord:
    kind: str
    key: tuple
    innovation_id: int


@dataclass
class InnovationTracker:
    base: int = 0
    size: int = NAMESPACE_SIZE
    counter: int | None = None
    _memo: dict[tuple[str, Hashable], int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.counter is None:
            self.counter = self.base

    @classmethod
    def for_clan(cls, clan_id: int) -> InnovationTracker:
        return cls(base=namespace_base(clan_id))

    def next_innovation(self, kind: str, key: Hashable) -> int:
        memo_key = (kind, key)
        found = self._memo.get(memo_key)
        if found is not None:
            return found
        if self.counter >= self.base + self.size:
            raise NamespaceExhausted(f"namespace at {self.base} is exhausted")
        innovation = self.counter
        self.counter += 1
        self._memo[memo_key] = innovation
        return innovation

    def new_generation(self) -> None:
        self._memo.clear()


class ProvisionalTracker(InnovationTracker):
    """Hands out placeholder ids and logs every request for later replay."""

    def __init__(self) -> None:
        super().__init__(base=PROVISIONAL_BASE, size=0xFFFFFFFF - PROVISIONAL_BASE)
        self.log: list[InnovationRecord] = []

    def next_innovation(self, kind: str, key: Hashable) -> int:
        before = self.counter
        innovation = super().next_innovation(kind, key)
        if self.counter != before:
            self.log.append(InnovationRecord(kind, tuple(key) if isinstance(key, tuple) else (key,), innovation))
        return innovation


def is_provisional(innovation_id: int) -> bool:
    return innovation_id >= PROVISIONAL_BASE


def canonicalize(
    genome: Genome, log: list[InnovationRecord], tracker: InnovationTracker
) -> Genome:
    """Rewrite provisional ids in ``genome`` to ids issued by ``tracker``."""
    mapping: dict[int, int] = {}

    def tr(value):
        return mapping.get(value, value) if isinstance(value, int) else value

    for rec in log:
        key = tuple(tr(part) for part in rec.key)
        if rec.kind == NODE and len(key) == 1:
            key = key[0]
        mapping[rec.innovation_id] = tracker.next_innovation(rec.kind, key)

    if not mapping:
        return genome
    nodes = {}
    for node in genome.nodes.values():
        nid = mapping.get(node.id, node.id)
        nodes[nid] = NodeGene(nid, node.kind, node.bias, node.activation)
    connections = {}
    for c in genome.connections.values():
        cid = mapping.get(c.innovation_id, c.innovation_id)
        connections[cid] = ConnectionGene(
            cid, mapping.get(c.in_node, c.in_node), mapping.get(c.out_node, c.out_node), c.weight, c.enabled
        )
    for nid in list(nodes) + list(connections):
        if is_provisional(nid):
            raise ValueError(f"genome {genome.genome_id}: provisional id {nid:#x} missing from log")
    return Genome(
        genome.genome_id,
        dict(sorted(nodes.items())),
        dict(sorted(connections.items())),
        genome.fitness,
        genome.adjusted_fitness,
    )
