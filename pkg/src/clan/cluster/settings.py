from __future__ import annotations

from dataclasses import dataclass

from clan.envs.base import EnvSpec, EvalMode
from clan.neat.config import NeatConfig


@dataclass(frozen=True)
class RunSettings:
    """Everything a node needs to take part in a run."""

    env: EnvSpec
    neat: NeatConfig
    mode: EvalMode = EvalMode.MULTI_STEP
    max_generations: int = 100
    seed: int = 0
    episodes: int | None = None

    @property
    def threshold(self) -> float:
        return self.env.solved_threshold

    def to_dict(self) -> dict:
        return {
            "env": self.env.to_dict(),
            "neat": self.neat.to_dict(),
            "mode": EvalMode(self.mode).value,
            "max_generations": self.max_generations,
            "seed": self.seed,
            "episodes": self.episodes,
        }

    @classmethod
    def from_dict(cls, d: dict) -> RunSettings:
        return cls(
            EnvSpec.from_dict(d["env"]),
            NeatConfig(**d["neat"]),
            EvalMode(d["mode"]),
            d["max_generations"],
            d["seed"],
            d["episodes"],
        )
