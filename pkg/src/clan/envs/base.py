from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class EnvError(ValueError):
    pass


class EvalMode(str, Enum):
    MULTI_STEP = "multi"
    SINGLE_STEP = "single"


@dataclass(frozen=True)
class EnvSpec:
    """Static description of a task.

    ``action_kind`` is ``"discrete"`` (``action_n`` choices, argmax over the
    outputs) or ``"continuous"`` (``action_n`` real outputs).
    """

    name: str
    observation_dim: int
    action_kind: str
    action_n: int
    max_steps: int = 200
    solved_threshold: float = float("inf")
    episodes: int = 1
    hidden_hint: int = 0
    flop_scale: int = 1
    params: dict = field(default_factory=dict, compare=True, hash=False)

    def __post_init__(self) -> None:
        if self.max_steps < 1:
            raise EnvError("max_steps must be >= 1")
        if self.observation_dim < 1:
            raise EnvError("observation_dim must be >= 1")
        if self.action_kind not in ("discrete", "continuous"):
            raise EnvError(f"unknown action kind {self.action_kind!r}")
        if self.episodes < 1 or self.flop_scale < 1 or self.hidden_hint < 0:
            raise EnvError("episodes and flop_scale must be >= 1, hidden_hint >= 0")

    @property
    def n_outputs(self) -> int:
        return self.action_n

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "observation_dim": self.observation_dim,
            "action_kind": self.action_kind,
            "action_n": self.action_n,
            "max_steps": self.max_steps,
            "solved_threshold": self.solved_threshold,
            "episodes": self.episodes,
            "hidden_hint": self.hidden_hint,
            "flop_scale": self.flop_scale,
            "params": dict(self.params),
        }

    @classmethod
    def from_dict(cls, d: dict) -> EnvSpec:
        return cls(**{**d, "params": dict(d.get("params", {}))})


@dataclass(frozen=True)
class EpisodeResult:
    total_reward: float
    steps_taken: int
    terminated_early: bool
