"""Running a whole experiment on the simulated network."""

from __future__ import annotations

from dataclasses import dataclass, field

from clan.cluster.nodes import Agent, Center, GenerationRecord
from clan.cluster.settings import RunSettings
from clan.cluster.topology import Topology, TopologyKind
from clan.envs.base import EnvSpec, EvalMode
from clan.metrics.ledger import CostLedger
from clan.neat.config import NeatConfig
from clan.neat.genome import Genome
from clan.neat.population import Population
from clan.transport.sim import ComputeModel, LinkModel, SimNetwork
from clan.transport.sockets import AgentEndpoint, CenterEndpoint, drive


@dataclass
class RunState:
    generation: int
    best_fitness: float
    converged: bool
    cost_ledger: CostLedger
    records: list[GenerationRecord] = field(default_factory=list)
    converged_generation: int | None = None
    population: Population | None = None
    clans: list[Population] = field(default_factory=list)
    best_genome: Genome | None = None
    sim_time: float = 0.0

    @property
    def best_fitness_sequence(self) -> list[float]:
        return [r.best_fitness for r in self.records]


@dataclass(frozen=True)
class SimTransport:
    link: LinkModel = LinkModel()
    compute: ComputeModel = ComputeModel()


def _settings(topology, env_spec, neat_config, mode, max_generations, seed, episodes) -> RunSettings:
    neat_config.validate()
    if max_generations < 0:
        raise ValueError("max_generations must be >= 0")
    if topology.kind == TopologyKind.DDA and topology.clans > neat_config.population_size:
        raise ValueError(f"{topology.clans} clans exceed population size {neat_config.population_size}")
    return RunSettings(
        env_spec,
        neat_config,
        EvalMode(mode),
        max_generations,
        neat_config.rng_seed if seed is None else seed,
        episodes,
    )


def _state(center: Center, agents: list[Agent], ledger: CostLedger, end: float = 0.0) -> RunState:
    for r in center.records:
        ledger.close_generation(r.generation)
    clans = sorted((c for a in agents for c in a.clans), key=lambda c: c.clan_id)
    best = center.best_genome
    for a in agents:
        if a.best_genome is not None and (best is None or a.best_genome.fitness > best.fitness):
            best = a.best_genome
    return RunState(
        generation=center.generation,
        best_fitness=center.best_fitness,
        converged=center.converged,
        cost_ledger=ledger,
        records=center.records,
        converged_generation=center.converged_generation,
        population=center.population,
        clans=clans,
        best_genome=best,
        sim_time=end,
    )


def run_experiment(
    topology: Topology,
    env_spec: EnvSpec,
    neat_config: NeatConfig,
    mode: EvalMode = EvalMode.MULTI_STEP,
    max_generations: int = 100,
    transport: SimTransport = SimTransport(),
    *,
    seed: int | None = None,
    episodes: int | None = None,
    audit: bool = False,
) -> RunState:
    """Loop generations until the task is solved or ``max_generations`` have
    been evaluated, with every node simulated in this process."""
    settings = _settings(topology, env_spec, neat_config, mode, max_generations, seed, episodes)
    ledger = CostLedger(audit=audit)
    net = SimNetwork(transport.link, transport.compute, ledger)
    center = Center(settings, topology)
    net.add_node(0, center.program())
    agents = []
    if topology.kind != TopologyKind.SERIAL:
        agents = [Agent(a) for a in center.agents]
        for agent in agents:
            net.add_node(agent.agent_id, agent.program())
    end = net.run()
    return _state(center, agents, ledger, end)


def run_center(
    topology: Topology,
    env_spec: EnvSpec,
    neat_config: NeatConfig,
    mode: EvalMode = EvalMode.MULTI_STEP,
    max_generations: int = 100,
    *,
    seed: int | None = None,
    episodes: int | None = None,
    host: str = "127.0.0.1",
    port: int = 0,
    timeout: float = 30.0,
    on_listen=None,
) -> RunState:
    """Coordinate agents on other processes or hosts over TCP.

    Only the center's own traffic and timing land in the returned ledger.
    In DDA the clan populations stay on the agents, so ``clans`` is empty
    and ``best_genome`` is the best the center has seen, if any.
    """
    if topology.kind == TopologyKind.SERIAL:
        raise ValueError("the serial topology has no agents; use run_experiment")
    settings = _settings(topology, env_spec, neat_config, mode, max_generations, seed, episodes)
    ledger = CostLedger()
    endpoint = CenterEndpoint(host, port, topology.agent_count, accept_timeout=timeout)
    try:
        if on_listen is not None:
            on_listen(endpoint.address)
        endpoint.wait_for_agents()
        center = Center(settings, topology)
        drive(center.program(), endpoint, ledger, recv_timeout=timeout * 10)
        endpoint.linger(timeout)
    finally:
        endpoint.close()
    return _state(center, [], ledger)


def run_agent(host: str, port: int, agent_id: int, *, timeout: float = 30.0) -> tuple[Agent, CostLedger]:
    """Serve one agent until the center sends STOP."""
    ledger = CostLedger()
    endpoint = AgentEndpoint(host, port, agent_id, connect_timeout=timeout)
    agent = Agent(agent_id)
    try:
        drive(agent.program(), endpoint, ledger, recv_timeout=timeout * 10)
    finally:
        endpoint.close()
    return agent, ledger
