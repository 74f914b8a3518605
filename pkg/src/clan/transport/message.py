"""Typed messages exchanged between the center and its agents.

Every body reports how many genome genes and how many scalars it carries;
these are the units the cost ledger charges, independent of the wire encoding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

from clan.neat.genome import Genome, gene_count
from clan.neat.innovation import InnovationRecord
from clan.neat.planning import WorkItem

BYTES_PER_GENE = 4

PARENT_GENOMES = "parent_genomes"
CHILD_GENOMES = "child_genomes"
INIT_GENOMES = "init_genomes"
FITNESS = "fitness"
PLAN = "plan"
TELEMETRY = "telemetry"
CONTROL = "control"
CATEGORIES = (PARENT_GENOMES, CHILD_GENOMES, INIT_GENOMES, FITNESS, PLAN, TELEMETRY, CONTROL)
GENOME_CATEGORIES = (PARENT_GENOMES, CHILD_GENOMES, INIT_GENOMES)


class MsgType(IntEnum):
    INIT = 1
    GENOMES = 2
    WORK_ITEMS = 3
    FITNESS_REPORT = 4
    PLAN = 5
    TELEMETRY = 6
    STOP = 7


@dataclass
class InitBody:
    """Run settings plus, for clan runs, the agent's initial shard."""

    settings: dict
    genomes: list[Genome] = field(default_factory=list)

    @property
    def genes(self) -> int:
        return sum(gene_count(g) for g in self.genomes)

    @property
    def scalars(self) -> int:
        return len(self.settings) + sum(g.fitness is not None for g in self.genomes)

    @property
    def category(self) -> str:
        return INIT_GENOMES if self.genomes else CONTROL


@dataclass
class GenomesBody:
    category: str
    genomes: list[Genome]
    # per-genome innovation logs for children bred with provisional ids
    logs: list[list[InnovationRecord]] | None = None

    def __post_init__(self) -> None:
        if self.category not in GENOME_CATEGORIES:
            raise ValueError(f"not a genome category: {self.category!r}")
        if self.logs is not None and len(self.logs) != len(self.genomes):
            raise ValueError("one innovation log per genome required")

    @property
    def genes(self) -> int:
        return sum(gene_count(g) for g in self.genomes)

    @property
    def scalars(self) -> int:
        n = sum(g.fitness is not None for g in self.genomes)
        if self.logs:
            n += sum(len(r.key) + 1 for log in self.logs for r in log)
        return n


@dataclass
class WorkItemsBody:
    items: list[WorkItem]
    genes = 0
    category = PLAN

    @property
    def scalars(self) -> int:
        return 4 * len(self.items)


@dataclass
class FitnessReportBody:
    entries: list[tuple[int, float]]
    genes = 0
    category = FITNESS

    @property
    def scalars(self) -> int:
        return len(self.entries)


@dataclass
class PlanBody:
    spawn_counts: dict[int, int]
    genes = 0
    category = PLAN

    @property
    def scalars(self) -> int:
        return 2 * len(self.spawn_counts)


@dataclass
class TelemetryBody:
    clan_id: int
    best_fitness: float
    mean_fitness: float
    best_genome_id: int
    species_count: int
    gene_total: int
    inference_ops: int
    evolution_ops: int
    solved: bool = False
    final: bool = False
    genes = 0
    category = TELEMETRY
    scalars = 10


@dataclass
class StopBody:
    genes = 0
    scalars = 0
    category = CONTROL


BODY_TYPES = {
    MsgType.INIT: InitBody,
    MsgType.GENOMES: GenomesBody,
    MsgType.WORK_ITEMS: WorkItemsBody,
    MsgType.FITNESS_REPORT: FitnessReportBody,
    MsgType.PLAN: PlanBody,
    MsgType.TELEMETRY: TelemetryBody,
    MsgType.STOP: StopBody,
}


@dataclass
class Message:
    msg_type: MsgType
    sender: int
    receiver: int
    generation: int
    body: object

    def __post_init__(self) -> None:
        self.msg_type = MsgType(self.msg_type)
        expected = BODY_TYPES[self.msg_type]
        if not isinstance(self.body, expected):
            raise TypeError(f"{self.msg_type.name} needs a {expected.__name__}, got {type(self.body).__name__}")

    @property
    def payload_genes(self) -> int:
        return self.body.genes

    @property
    def scalars(self) -> int:
        return self.body.scalars

    @property
    def category(self) -> str:
        return self.body.category

    @property
    def cost_bytes(self) -> int:
        """Size in 32-bit genes/scalars, the unit used for cost comparisons."""
        return BYTES_PER_GENE * (self.payload_genes + self.scalars)

    @property
    def genes_communicated(self) -> int:
        return self.payload_genes + self.scalars


def stop(sender: int, receiver: int, generation: int) -> Message:
    return Message(MsgType.STOP, sender, receiver, generation, StopBody())
