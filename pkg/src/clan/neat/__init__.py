"""NEAT: genomes, evaluation, speciation, planning and reproduction."""

from clan.neat.config import ConfigError, NeatConfig
from clan.neat.cost import GeneOps
from clan.neat.genome import (
    Activation,
    ArityError,
    ConnectionGene,
    Genome,
    GenomeError,
    NodeGene,
    NodeKind,
    UnevaluatedGenomeError,
    gene_count,
    topological_order,
    validate_genome,
)
from clan.neat.innovation import InnovationTracker, ProvisionalTracker, canonicalize
from clan.neat.network import compile_network, evaluate_network
from clan.neat.planning import (
    GenerationPlan,
    TotalExtinctionError,
    WorkItem,
    assign_work,
    plan_generation,
)
from clan.neat.population import Population
from clan.neat.reproduction import breed_child, crossover, mutate
from clan.neat.species import Species, compatibility_distance, share_fitness, speciate


def next_innovation(innovations: InnovationTracker, kind: str, key) -> int:
    return innovations.next_innovation(kind, key)


__all__ = [
    "Activation",
    "ArityError",
    "ConfigError",
    "ConnectionGene",
    "GeneOps",
    "GenerationPlan",
    "Genome",
    "GenomeError",
    "InnovationTracker",
    "NeatConfig",
    "NodeGene",
    "NodeKind",
    "Population",
    "ProvisionalTracker",
    "Species",
    "TotalExtinctionError",
    "UnevaluatedGenomeError",
    "WorkItem",
    "assign_work",
    "breed_child",
    "canonicalize",
    "compatibility_distance",
    "compile_network",
    "crossover",
    "evaluate_network",
    "gene_count",
    "mutate",
    "next_innovation",
    "plan_generation",
    "share_fitness",
    "speciate",
    "topological_order",
    "validate_genome",
]
