"""Center/agent orchestration for the serial, DCS, DDS and DDA topologies."""

from clan.cluster.nodes import Agent, Center, GenerationRecord, ProtocolError
from clan.cluster.runner import RunState, SimTransport, run_agent, run_center, run_experiment
from clan.cluster.settings import RunSettings
from clan.cluster.topology import Topology, TopologyKind, clan_sizes, round_robin

__all__ = [
    "Agent", "Center", "GenerationRecord", "ProtocolError", "RunSettings", "RunState",
    "SimTransport", "Topology", "TopologyKind", "clan_sizes", "round_robin", "run_agent", "run_center",
    "run_experiment",
]
