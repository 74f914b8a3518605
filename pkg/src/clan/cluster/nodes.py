"""Center and agent programs for each topology.

Programs are generators yielding transport requests (see
``clan.transport.effects``), so the same code runs under the simulator and
over sockets. The center is node 0 and agents are nodes 1..N.

Generation ``g`` covers forming the population of ``g`` and evaluating it;
costs and messages are tagged with that generation.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace

from clan.cluster.settings import RunSettings
from clan.cluster.topology import Topology, TopologyKind, clan_owner, clan_sizes, round_robin
from clan.envs.evaluate import evaluate_genome
from clan.neat.cost import GeneOps
from clan.neat.genome import Genome, gene_count
from clan.neat.innovation import InnovationTracker, ProvisionalTracker, canonicalize
from clan.neat.planning import WorkItem
from clan.neat.population import Population
from clan.neat.reproduction import breed_child
from clan.transport.effects import EVOLUTION, INFERENCE, Compute, Poll, Recv, Send
from clan.transport.message import (
    CHILD_GENOMES,
    PARENT_GENOMES,
    FitnessReportBody,
    GenomesBody,
    InitBody,
    Message,
    MsgType,
    TelemetryBody,
    WorkItemsBody,
    stop,
)

CENTER = 0


class ProtocolError(RuntimeError):
    pass


@dataclass
class GenerationRecord:
    generation: int
    best_fitness: float
    mean_fitness: float
    best_genome_id: int
    species_count: int
    genes_total: int
    solved: bool
    clans_reported: int = 1

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate_all(settings: RunSettings, genomes: list[Genome], generation: int) -> tuple[list[tuple[int, float]], int]:
    ops = GeneOps()
    entries = [
        (
            g.genome_id,
            evaluate_genome(
                settings.env, g, settings.mode, settings.episodes,
                seed=settings.seed, generation=generation, ops=ops,
            ),
        )
        for g in genomes
    ]
    return entries, ops.count


def new_population(settings: RunSettings, *, clan_id: int = 0, size: int | None = None) -> Population:
    env = settings.env
    config = settings.neat if size is None else _resized(settings.neat, size)
    return Population.create(
        config,
        n_inputs=env.observation_dim,
        n_outputs=env.n_outputs,
        n_hidden=env.hidden_hint,
        seed=settings.seed,
        clan_id=clan_id,
    )


def _resized(config, size: int):
    # a clan plans for its own size; validation applies to the whole run's config
    return replace(config, population_size=size)


def _expect(msg: Message, msg_type: MsgType, generation: int | None = None) -> Message:
    if msg.msg_type != msg_type:
        raise ProtocolError(f"expected {msg_type.name}, got {msg.msg_type.name} from node {msg.sender}")
    if generation is not None and msg.generation != generation:
        raise ProtocolError(f"expected generation {generation}, got {msg.generation} from node {msg.sender}")
    return msg


class Center:
    """Coordinator state shared by all topologies."""

    def __init__(self, settings: RunSettings, topology: Topology):
        self.settings = settings
        self.topology = topology
        self.records: list[GenerationRecord] = []
        self.converged = False
        self.converged_generation: int | None = None
        self.best_genome: Genome | None = None
        self.population: Population | None = None
        self.generation = 0

    @property
    def agents(self) -> list[int]:
        return list(range(1, self.topology.agent_count + 1))

    @property
    def best_fitness(self) -> float:
        return max((r.best_fitness for r in self.records), default=float("-inf"))

    def _settings_for(self, agent: int) -> dict:
        return {"topology": self.topology.kind.value, "agent_id": agent, **self.settings.to_dict()}

    def _record_population(self, g: int) -> None:
        pop = self.population
        best = pop.best()
        fits = [x.fitness for x in pop.genomes]
        solved = best.fitness >= self.settings.threshold
        self.records.append(
            GenerationRecord(
                g, best.fitness, sum(fits) / len(fits), best.genome_id, len(pop.species),
                sum(gene_count(x) for x in pop.genomes), solved,
            )
        )
        if self.best_genome is None or best.fitness > self.best_genome.fitness:
            self.best_genome = best.copy()
        self.generation = g
        if solved and not self.converged:
            self.converged = True
            self.converged_generation = g

    def _apply_fitness(self, entries) -> None:
        by_id = self.population.by_id
        for gid, f in entries:
            by_id[gid].fitness = f
        missing = [g.genome_id for g in self.population.genomes if g.fitness is None]
        if missing:
            raise ProtocolError(f"no fitness reported for genomes {missing[:5]}")

    def _broadcast_stop(self, g: int):
        for a in self.agents:
            yield Send(stop(CENTER, a, g))

    def program(self):
        kind = self.topology.kind
        if kind == TopologyKind.SERIAL:
            return self._serial()
        if kind == TopologyKind.DCS:
            return self._synchronous(distributed_reproduction=False)
        if kind == TopologyKind.DDS:
            return self._synchronous(distributed_reproduction=True)
        return self._dda()

    # -- serial baseline -------------------------------------------------

    def _serial(self):
        s = self.settings
        self.population = pop = new_population(s)
        for g in range(s.max_generations):
            if g > 0:
                ops = GeneOps()
                pop.step(ops)
                yield Compute(EVOLUTION, ops.count, g)
            entries, iops = evaluate_all(s, pop.genomes, g)
            yield Compute(INFERENCE, iops, g)
            self._apply_fitness(entries)
            self._record_population(g)
            if self.converged:
                break

    # -- CLAN_DCS and CLAN_DDS ---------------------------------------------

    def _synchronous(self, distributed_reproduction: bool):
        s = self.settings
        self.population = pop = new_population(s)
        for a in self.agents:
            yield Send(Message(MsgType.INIT, CENTER, a, 0, InitBody(self._settings_for(a))))
        g = -1
        for g in range(s.max_generations):
            if g == 0 or not distributed_reproduction:
                if g > 0:
                    ops = GeneOps()
                    pop.step(ops)
                    yield Compute(EVOLUTION, ops.count, g)
                yield from self._scatter_genomes(g)
            else:
                yield from self._scatter_work(g)
            self._record_population(g)
            if self.converged:
                break
        yield from self._broadcast_stop(max(g, 0))

    def _scatter_genomes(self, g: int):
        shards = round_robin(self.population.genomes, len(self.agents))
        for a, shard in zip(self.agents, shards):
            body = GenomesBody(CHILD_GENOMES, [x.copy() for x in shard])
            yield Send(Message(MsgType.GENOMES, CENTER, a, g, body))
        entries = []
        for _ in self.agents:
            msg = _expect((yield Recv(g)), MsgType.FITNESS_REPORT, g)
            entries.extend(msg.body.entries)
        self._apply_fitness(entries)

    def _scatter_work(self, g: int):
        pop = self.population
        ops = GeneOps()
        items = pop.evolve(ops)
        yield Compute(EVOLUTION, ops.count, g)
        parents = pop.by_id
        for a, share in zip(self.agents, round_robin(items, len(self.agents))):
            yield Send(Message(MsgType.WORK_ITEMS, CENTER, a, g, WorkItemsBody(share)))
            needed = pop.parents_for(share)
            body = GenomesBody(PARENT_GENOMES, [needed[k].copy() for k in sorted(needed)])
            yield Send(Message(MsgType.GENOMES, CENTER, a, g, body))

        bred: dict[int, tuple[Genome, list]] = {}
        entries = []
        for _ in range(2 * len(self.agents)):
            msg = yield Recv(g)
            if msg.generation != g:
                raise ProtocolError(f"generation {msg.generation} message during generation {g}")
            if msg.msg_type == MsgType.FITNESS_REPORT:
                entries.extend(msg.body.entries)
            elif msg.msg_type == MsgType.GENOMES and msg.body.category == CHILD_GENOMES:
                for child, log in zip(msg.body.genomes, msg.body.logs or [[]] * len(msg.body.genomes)):
                    bred[child.genome_id] = (child, log)
            else:
                raise ProtocolError(f"unexpected {msg.msg_type.name} from node {msg.sender}")

        # replay innovation requests in child order, exactly as local breeding would
        pop.tracker.new_generation()
        children = []
        for item in items:
            if item.elite:
                elite = parents[item.genome_id].copy()
                elite.fitness = elite.adjusted_fitness = None
                children.append(elite)
            else:
                child, log = bred.pop(item.genome_id)
                children.append(canonicalize(child, log, pop.tracker))
        if bred:
            raise ProtocolError(f"unrequested children {sorted(bred)[:5]}")
        pop.adopt(children)
        self._apply_fitness(entries)

    # -- CLAN_DDA ---------------------------------------------------------

    def _dda(self):
        s = self.settings
        n_clans = self.topology.clans
        sizes = clan_sizes(s.neat.population_size, n_clans)
        shards: dict[int, list[dict]] = {a: [] for a in self.agents}
        genomes: dict[int, list[Genome]] = {a: [] for a in self.agents}
        for c, size in enumerate(sizes):
            clan = new_population(s, clan_id=c, size=size)
            owner = clan_owner(c, len(self.agents))
            shards[owner].append(
                {
                    "clan_id": c,
                    "size": size,
                    "tracker_counter": clan.tracker.counter,
                    "next_genome_id": clan.next_genome_id,
                    "next_species_id": clan.next_species_id,
                }
            )
            genomes[owner].extend(clan.genomes)
        for a in self.agents:
            settings = {**self._settings_for(a), "clans": shards[a]}
            yield Send(Message(MsgType.INIT, CENTER, a, 0, InitBody(settings, genomes[a])))
        if s.max_generations == 0:
            return (yield from self._broadcast_stop(0))

        owned = {a: len(shards[a]) for a in self.agents}
        finished = {a for a in self.agents if owned[a] == 0}
        telemetry: dict[int, dict[int, TelemetryBody]] = {}
        final_clans: dict[int, int] = {a: 0 for a in self.agents}
        last_g = 0
        while len(finished) < len(self.agents):
            msg = _expect((yield Recv(last_g)), MsgType.TELEMETRY)
            t: TelemetryBody = msg.body
            telemetry.setdefault(msg.generation, {})[t.clan_id] = t
            last_g = max(last_g, msg.generation)
            if t.final:
                final_clans[msg.sender] += 1
                if final_clans[msg.sender] == owned[msg.sender]:
                    finished.add(msg.sender)
            if t.solved and not self.converged:
                self.converged = True
                self.converged_generation = msg.generation
                break
        self._records_from_telemetry(telemetry, sizes)
        yield from self._broadcast_stop(last_g)

    def _records_from_telemetry(self, telemetry, sizes) -> None:
        for g in sorted(telemetry):
            reports = telemetry[g]
            best = max(reports.values(), key=lambda t: (t.best_fitness, -t.best_genome_id))
            weight = sum(sizes[c] for c in reports)
            mean = sum(t.mean_fitness * sizes[c] for c, t in reports.items()) / weight
            self.records.append(
                GenerationRecord(
                    g, best.best_fitness, mean, best.best_genome_id,
                    sum(t.species_count for t in reports.values()),
                    sum(t.gene_total for t in reports.values()),
                    any(t.solved for t in reports.values()),
                    len(reports),
                )
            )
        if self.records:
            self.generation = self.records[-1].generation
        if self.converged:
            self.generation = self.converged_generation


class Agent:
    """Worker node; its behaviour is set by the INIT message it receives."""

    def __init__(self, agent_id: int):
        self.agent_id = agent_id
        self.settings: RunSettings | None = None
        self.clans: list[Population] = []
        self.best_genome: Genome | None = None
        self.stopped_by_center = False

    def program(self):
        msg = _expect((yield Recv(0)), MsgType.INIT, 0)
        self.settings = RunSettings.from_dict(msg.body.settings)
        if msg.body.settings["topology"] == TopologyKind.DDA.value:
            yield from self._clan_loop(msg.body)
        else:
            yield from self._serve()

    def _send(self, msg_type: MsgType, g: int, body):
        return Send(Message(msg_type, self.agent_id, CENTER, g, body))

    def _serve(self):
        s = self.settings
        g = 0
        while True:
            msg = yield Recv(g)
            g = msg.generation
            if msg.msg_type == MsgType.STOP:
                self.stopped_by_center = True
                return
            if msg.msg_type == MsgType.GENOMES:
                entries, iops = evaluate_all(s, msg.body.genomes, g)
                yield Compute(INFERENCE, iops, g)
                yield self._send(MsgType.FITNESS_REPORT, g, FitnessReportBody(entries))
            elif msg.msg_type == MsgType.WORK_ITEMS:
                items: list[WorkItem] = msg.body.items
                parents_msg = _expect((yield Recv(g)), MsgType.GENOMES, g)
                parents = {p.genome_id: p for p in parents_msg.body.genomes}
                children, logs, ops = self._breed(items, parents, g)
                yield Compute(EVOLUTION, ops, g)
                entries, iops = evaluate_all(s, children, g)
                yield Compute(INFERENCE, iops, g)
                bred = [(c, log) for it, c, log in zip(items, children, logs) if not it.elite]
                body = GenomesBody(CHILD_GENOMES, [c for c, _ in bred], [log for _, log in bred])
                yield self._send(MsgType.GENOMES, g, body)
                yield self._send(MsgType.FITNESS_REPORT, g, FitnessReportBody(entries))
            else:
                raise ProtocolError(f"agent {self.agent_id} got unexpected {msg.msg_type.name}")

    def _breed(self, items, parents, g: int):
        s = self.settings
        ops = GeneOps()
        children, logs = [], []
        for item in items:
            tracker = ProvisionalTracker()
            # the work items form generation g from the parents of generation g - 1
            child = breed_child(item, parents, s.neat, tracker, seed=s.seed, clan_id=0, generation=g - 1, ops=ops)
            children.append(child)
            logs.append(tracker.log)
        return children, logs, ops.count

    def _clan_loop(self, init: InitBody):
        s = self.settings
        pool = list(init.genomes)
        for shard in init.settings["clans"]:
            members, pool = pool[: shard["size"]], pool[shard["size"] :]
            tracker = InnovationTracker.for_clan(shard["clan_id"])
            tracker.counter = shard["tracker_counter"]
            self.clans.append(
                Population(
                    _resized(s.neat, shard["size"]),
                    members,
                    tracker,
                    seed=s.seed,
                    clan_id=shard["clan_id"],
                    next_genome_id=shard["next_genome_id"],
                    next_species_id=shard["next_species_id"],
                )
            )
        if not self.clans or s.max_generations == 0:
            return (yield from self._await_stop(0))
        g = 0
        while True:
            done = g + 1 >= s.max_generations
            solved_any = False
            for clan in self.clans:
                eops = GeneOps()
                if g > 0:
                    clan.step(eops)
                    yield Compute(EVOLUTION, eops.count, g)
                entries, iops = evaluate_all(s, clan.genomes, g)
                yield Compute(INFERENCE, iops, g)
                by_id = clan.by_id
                for gid, f in entries:
                    by_id[gid].fitness = f
                best = clan.best()
                if self.best_genome is None or best.fitness > self.best_genome.fitness:
                    self.best_genome = best.copy()
                solved = best.fitness >= s.threshold
                solved_any |= solved
                fits = [x.fitness for x in clan.genomes]
                body = TelemetryBody(
                    clan.clan_id, best.fitness, sum(fits) / len(fits), best.genome_id, len(clan.species),
                    sum(gene_count(x) for x in clan.genomes), iops, eops.count,
                    solved=solved, final=done,
                )
                yield self._send(MsgType.TELEMETRY, g, body)
            if done or solved_any:
                return (yield from self._await_stop(g))
            msg = yield Poll()
            if msg is not None:
                _expect(msg, MsgType.STOP)
                self.stopped_by_center = True
                return
            g += 1

    def _await_stop(self, g: int):
        msg = _expect((yield Recv(g)), MsgType.STOP)
        self.stopped_by_center = msg is not None
