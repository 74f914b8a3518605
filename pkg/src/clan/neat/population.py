"""A self-contained NEAT population (the whole run, or one clan of it)."""

from __future__ import annotations

from typing import Iterable

from clan.neat import rng as rngs
from clan.neat.config import NeatConfig
from clan.neat.cost import GeneOps
from clan.neat.genome import ConnectionGene, Genome, NodeGene, NodeKind
from clan.neat.innovation import CONN, NODE, InnovationRecord, InnovationTracker, canonicalize
from clan.neat.planning import GenerationPlan, WorkItem, assign_work, plan_generation
from clan.neat.reproduction import breed_child
from clan.neat.species import Species, record_species_fitness, share_fitness, speciate

ID_SHIFT = 32


def clan_id_base(clan_id: int) -> int:
    return clan_id << ID_SHIFT


def initial_genomes(
    config: NeatConfig,
    tracker: InnovationTracker,
    *,
    count: int,
    n_inputs: int,
    n_outputs: int,
    n_hidden: int = 0,
    seed: int,
    clan_id: int = 0,
) -> list[Genome]:
    """Fully connected starting networks sharing one set of innovation ids.

    With ``n_hidden`` > 0 the inputs feed a hidden layer that feeds the outputs.
    Weights are drawn per genome from the clan's init stream.
    """
    act = config.activation_tag
    inputs = [tracker.next_innovation(NODE, ("input", i)) for i in range(n_inputs)]
    outputs = [tracker.next_innovation(NODE, ("output", j)) for j in range(n_outputs)]
    hidden = [tracker.next_innovation(NODE, ("hidden", h)) for h in range(n_hidden)]
    if hidden:
        pairs = [(a, h) for h in hidden for a in inputs] + [(h, o) for o in outputs for h in hidden]
    else:
        pairs = [(a, o) for o in outputs for a in inputs]
    innovs = [tracker.next_innovation(CONN, p) for p in pairs]

    genomes = []
    for i in range(count):
        r = rngs.stream(seed, rngs.INIT, clan_id, i)
        nodes = {nid: NodeGene(nid, NodeKind.INPUT, 0.0, act) for nid in inputs}
        nodes.update({nid: NodeGene(nid, NodeKind.OUTPUT, 0.0, act) for nid in outputs})
        nodes.update({nid: NodeGene(nid, NodeKind.HIDDEN, 0.0, act) for nid in hidden})
        weights = r.normal(0.0, config.init_weight_sigma, size=len(pairs)).clip(config.weight_min, config.weight_max)
        conns = {
            innov: ConnectionGene(innov, a, b, float(w), True)
            for innov, (a, b), w in zip(innovs, pairs, weights)
        }
        genomes.append(Genome(clan_id_base(clan_id) + i, nodes, conns))
    return genomes


class Population:
    def __init__(
        self,
        config: NeatConfig,
        genomes: list[Genome],
        tracker: InnovationTracker,
        *,
        seed: int,
        clan_id: int = 0,
        generation: int = 0,
        next_genome_id: int | None = None,
        next_species_id: int | None = None,
    ):
        self.config = config
        self.genomes = genomes
        self.tracker = tracker
        self.seed = seed
        self.clan_id = clan_id
        self.generation = generation
        self.next_genome_id = (
            max(g.genome_id for g in genomes) + 1 if next_genome_id is None else next_genome_id
        )
        self.next_species_id = clan_id_base(clan_id) if next_species_id is None else next_species_id
        self.species: list[Species] = []
        self.plan: GenerationPlan | None = None

    @classmethod
    def create(
        cls,
        config: NeatConfig,
        *,
        n_inputs: int,
        n_outputs: int,
        n_hidden: int = 0,
        seed: int | None = None,
        clan_id: int = 0,
        size: int | None = None,
    ) -> Population:
        seed = config.rng_seed if seed is None else seed
        tracker = InnovationTracker.for_clan(clan_id)
        genomes = initial_genomes(
            config,
            tracker,
            count=config.population_size if size is None else size,
            n_inputs=n_inputs,
            n_outputs=n_outputs,
            n_hidden=n_hidden,
            seed=seed,
            clan_id=clan_id,
        )
        return cls(config, genomes, tracker, seed=seed, clan_id=clan_id)

    @property
    def by_id(self) -> dict[int, Genome]:
        return {g.genome_id: g for g in self.genomes}

    def best(self) -> Genome:
        return max(self.genomes, key=lambda g: (g.require_fitness(), -g.genome_id))

    def evolve(self, ops: GeneOps | None = None) -> list[WorkItem]:
        """Speciate the evaluated population and plan the next one."""
        population = self.by_id
        self.species, self.next_species_id = speciate(
            self.genomes, self.species, self.config, self.next_species_id, ops
        )
        record_species_fitness(self.species, population)
        share_fitness(self.species, population)
        self.plan = plan_generation(self.species, population, self.config)
        culled = set(self.plan.culled)
        self.species = [s for s in self.species if s.species_id not in culled]
        items, self.next_genome_id = assign_work(
            self.plan,
            seed=self.seed,
            clan_id=self.clan_id,
            generation=self.generation,
            first_genome_id=self.next_genome_id,
        )
        return items

    def parents_for(self, items: Iterable[WorkItem]) -> dict[int, Genome]:
        population = self.by_id
        needed = sorted({gid for it in items for gid in (it.parent_a, it.parent_b)})
        return {gid: population[gid] for gid in needed}

    def breed(self, items: list[WorkItem], ops: GeneOps | None = None) -> list[Genome]:
        parents = self.parents_for(items)
        self.tracker.new_generation()
        return [
            breed_child(
                item,
                parents,
                self.config,
                self.tracker,
                seed=self.seed,
                clan_id=self.clan_id,
                generation=self.generation,
                ops=ops,
            )
            for item in items
        ]

    def adopt(self, children: list[Genome]) -> None:
        self.genomes = children
        self.generation += 1

    def adopt_provisional(
        self, children: list[Genome], logs: list[list[InnovationRecord]]
    ) -> None:
        """Adopt children bred elsewhere, replaying their innovation logs in child order."""
        self.tracker.new_generation()
        self.adopt([canonicalize(c, log, self.tracker) for c, log in zip(children, logs)])

    def step(self, ops: GeneOps | None = None) -> None:
        """Evolve and reproduce locally: evaluated generation g -> unevaluated g+1."""
        self.adopt(self.breed(self.evolve(ops), ops))
