"""Hyperparameters for the NEAT engine."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

from clan.neat.genome import Activation


class ConfigError(ValueError):
    """Raised when a configuration value is out of its domain."""


_PROBABILITIES = (
    "p_add_conn",
    "p_del_conn",
    "p_add_node",
    "p_del_node",
    "p_perturb",
    "p_replace_weight",
    "survival_threshold",
)


@dataclass(frozen=True)
class NeatConfig:
    population_size: int = 150
    compatibility_threshold: float = 3.0
    c1: float = 1.0
    c2: float = 1.0
    c3: float = 0.4
    survival_threshold: float = 0.2
    elitism_per_species: int = 2
    stagnation_limit: int = 15
    p_add_conn: float = 0.15
    p_del_conn: float = 0.1
    p_add_node: float = 0.05
    p_del_node: float = 0.03
    p_perturb: float = 0.8
    perturb_sigma: float = 0.5
    p_replace_weight: float = 0.1
    weight_min: float = -8.0
    weight_max: float = 8.0
    init_weight_sigma: float = 1.0
    activation: str = "sigmoid"
    rng_seed: int = 0

    def validate(self) -> NeatConfig:
        for name in _PROBABILITIES:
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {value}")
        if self.p_perturb + self.p_replace_weight > 1.0:
            raise ConfigError("p_perturb + p_replace_weight must not exceed 1")
        if self.population_size < 2:
            raise ConfigError(f"population_size must be >= 2, got {self.population_size}")
        if self.compatibility_threshold <= 0:
            raise ConfigError("compatibility_threshold must be > 0")
        if self.elitism_per_species < 0:
            raise ConfigError("elitism_per_species must be >= 0")
        if self.stagnation_limit < 1:
            raise ConfigError("stagnation_limit must be >= 1")
        if self.perturb_sigma < 0 or self.init_weight_sigma < 0:
            raise ConfigError("sigma values must be >= 0")
        if self.weight_min >= self.weight_max:
            raise ConfigError("weight_min must be < weight_max")
        if not 0 <= self.rng_seed < 2**64:
            raise ConfigError("rng_seed must be a 64-bit unsigned integer")
        try:
            Activation.from_name(self.activation)
        except KeyError:
            raise ConfigError(f"unknown activation {self.activation!r}") from None
        return self

    @property
    def weight_range(self) -> tuple[float, float]:
        return (self.weight_min, self.weight_max)

    @property
    def activation_tag(self) -> Activation:
        return Activation.from_name(self.activation)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]
