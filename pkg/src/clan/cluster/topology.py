"""Who does inference, reproduction and speciation, and on how many agents."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class TopologyKind(str, Enum):
    SERIAL = "serial"
    # distributed inference, central reproduction, synchronous speciation
    DCS = "dcs"
    # distributed inference and reproduction, synchronous speciation
    DDS = "dds"
    # everything distributed, each agent speciates its own clans
    DDA = "dda"

    @classmethod
    def parse(cls, text: str) -> TopologyKind:
        key = text.strip().lower()
        if key.startswith("clan_"):
            key = key[5:]
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown topology {text!r}; choose from {[k.value for k in cls]}") from None


@dataclass(frozen=True)
class Topology:
    kind: TopologyKind = TopologyKind.SERIAL
    agent_count: int = 1
    clan_count: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", TopologyKind.parse(self.kind) if isinstance(self.kind, str) else self.kind)
        if self.agent_count < 1:
            raise ValueError("agent_count must be >= 1")
        if self.clan_count is not None and self.clan_count < 1:
            raise ValueError("clan_count must be >= 1")

    @property
    def clans(self) -> int:
        if self.kind != TopologyKind.DDA:
            return 1
        return self.agent_count if self.clan_count is None else self.clan_count

    @property
    def name(self) -> str:
        return "serial" if self.kind == TopologyKind.SERIAL else f"CLAN_{self.kind.value.upper()}"


def round_robin(seq, n: int) -> list[list]:
    """Slice k holds the elements whose index is congruent to k mod n."""
    return [list(seq[k::n]) for k in range(n)]


def clan_sizes(population_size: int, clans: int) -> list[int]:
    if clans > population_size:
        raise ValueError(f"{clans} clans cannot split a population of {population_size}")
    base, extra = divmod(population_size, clans)
    return [base + (1 if c < extra else 0) for c in range(clans)]


def clan_owner(clan_id: int, agents: int) -> int:
    """Agent node id owning a clan; agents are numbered from 1."""
    return clan_id % agents + 1
