"""INI experiment configuration: parse, validate, render.

Example::

    [experiment]
    topology = dcs
    agents = 4
    env = cartpole
    seeds = 1, 2, 3

    [neat]
    population_size = 150

Unknown sections and keys are errors, and messages name the offending key.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, fields, replace

from clan.cluster.topology import Topology, TopologyKind
from clan.envs import EnvSpec, EvalMode, spec_by_name
from clan.neat.config import ConfigError, NeatConfig
from clan.transport.sim import DEFAULT_BANDWIDTH, DEFAULT_LATENCY, ComputeModel, LinkModel
from clan.transport.sockets import DEFAULT_PORT

ENV_KEYS = {
    "cartpole": {"max_steps": int, "solved_threshold": float, "episodes": int},
    "mountaincar": {"max_steps": int, "solved_threshold": float, "episodes": int},
    "synthetic": {
        "obs_dim": int,
        "hidden_hint": int,
        "steps": int,
        "flop_scale": int,
        "action_dim": int,
        "target_seed": int,
        "solved_threshold": float,
    },
}


@dataclass(frozen=True)
class TransportConfig:
    kind: str = "sim"
    bandwidth: float = DEFAULT_BANDWIDTH
    latency: float = DEFAULT_LATENCY
    inference_s_per_gene: float = ComputeModel.inference_s_per_gene
    evolution_s_per_gene: float = ComputeModel.evolution_s_per_gene
    host: str = "127.0.0.1"
    port: int = DEFAULT_PORT
    timeout: float = 30.0

    @property
    def link(self) -> LinkModel:
        return LinkModel(self.bandwidth, self.latency)

    @property
    def compute(self) -> ComputeModel:
        return ComputeModel(self.inference_s_per_gene, self.evolution_s_per_gene)


@dataclass(frozen=True)
class ExperimentConfig:
    topology: str = "serial"
    agents: int = 1
    clans: int | None = None
    env: str = "cartpole"
    mode: str = "multi"
    max_generations: int = 150
    seeds: tuple[int, ...] = (1,)
    episodes: int | None = None
    output: str = "runs"
    global_respeciation: bool = False
    env_params: dict = field(default_factory=dict)
    neat: NeatConfig = field(default_factory=NeatConfig)
    transport: TransportConfig = field(default_factory=TransportConfig)

    @property
    def topology_spec(self) -> Topology:
        return Topology(TopologyKind.parse(self.topology), self.agents, self.clans)

    @property
    def env_spec(self) -> EnvSpec:
        return spec_by_name(self.env, **self.env_params)

    @property
    def eval_mode(self) -> EvalMode:
        return EvalMode(self.mode)

    def validate(self) -> ExperimentConfig:
        try:
            TopologyKind.parse(self.topology)
            self.topology_spec
        except ValueError as exc:
            raise ConfigError(f"[experiment] topology/agents/clans: {exc}") from None
        if self.env not in ENV_KEYS:
            raise ConfigError(f"[experiment] env: unknown environment {self.env!r}")
        if self.mode not in {m.value for m in EvalMode}:
            raise ConfigError(f"[experiment] mode: must be 'multi' or 'single', got {self.mode!r}")
        if self.max_generations < 0:
            raise ConfigError("[experiment] max_generations: must be >= 0")
        if not self.seeds:
            raise ConfigError("[experiment] seeds: at least one seed required")
        if any(not 0 <= s < 2**64 for s in self.seeds):
            raise ConfigError("[experiment] seeds: must be 64-bit unsigned integers")
        if self.episodes is not None and self.episodes < 1:
            raise ConfigError("[experiment] episodes: must be >= 1")
        if self.global_respeciation:
            raise ConfigError("[experiment] global_respeciation: periodic global re-speciation is not supported")
        clans = self.topology_spec.clans if self.clans is None else self.clans
        if clans > self.neat.population_size:
            raise ConfigError(
                f"[experiment] clans: {clans} clans exceed population_size {self.neat.population_size}"
            )
        try:
            self.neat.validate()
        except ConfigError as exc:
            raise ConfigError(f"[neat] {exc}") from None
        try:
            self.env_spec
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"[env] {exc}") from None
        t = self.transport
        if t.kind not in ("sim", "sockets"):
            raise ConfigError(f"[transport] kind: must be 'sim' or 'sockets', got {t.kind!r}")
        try:
            t.link
        except ValueError as exc:
            raise ConfigError(f"[transport] {exc}") from None
        if t.inference_s_per_gene < 0 or t.evolution_s_per_gene < 0 or t.timeout <= 0:
            raise ConfigError("[transport] timing parameters must be non-negative (timeout > 0)")
        if not 0 < t.port < 65536:
            raise ConfigError(f"[transport] port: {t.port} out of range")
        return self

    def with_overrides(self, **changes) -> ExperimentConfig:
        changes = {k: v for k, v in changes.items() if v is not None}
        return replace(self, **changes).validate() if changes else self


_EXPERIMENT_TYPES = {
    "topology": str,
    "agents": int,
    "clans": "optional_int",
    "env": str,
    "mode": str,
    "max_generations": int,
    "seeds": "seeds",
    "episodes": "optional_int",
    "output": str,
    "global_respeciation": bool,
}


def _convert(section: str, key: str, raw: str, kind):
    text = raw.strip()
    try:
        if kind == "optional_int":
            return None if text in ("", "none") else int(text)
        if kind == "seeds":
            return tuple(int(p) for p in text.replace(",", " ").split())
        if kind is bool:
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {text!r}")
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
        return text
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: {exc}") from None


def _field_types(cls) -> dict[str, type]:
    defaults = cls()
    return {f.name: type(getattr(defaults, f.name)) for f in fields(cls)}


def parse_config(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None, default_section="__none__")
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from None
    unknown = [s for s in parser.sections() if s not in ("experiment", "env", "neat", "transport")]
    if unknown:
        raise ConfigError(f"unknown section [{unknown[0]}]")

    def section(name: str, types: dict) -> dict:
        if not parser.has_section(name):
            return {}
        out = {}
        for key, raw in parser.items(name):
            if key not in types:
                raise ConfigError(f"[{name}] unknown key {key!r}")
            out[key] = _convert(name, key, raw, types[key])
        return out

    exp = section("experiment", _EXPERIMENT_TYPES)
    env_name = exp.get("env", "cartpole")
    if env_name not in ENV_KEYS:
        raise ConfigError(f"[experiment] env: unknown environment {env_name!r}")
    env_params = section("env", ENV_KEYS[env_name])
    neat = NeatConfig(**section("neat", _field_types(NeatConfig)))
    transport = TransportConfig(**section("transport", _field_types(TransportConfig)))
    return ExperimentConfig(**exp, env_params=env_params, neat=neat, transport=transport).validate()


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def _render_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return ", ".join(str(x) for x in v)
    if isinstance(v, float):
        return "inf" if math.isinf(v) and v > 0 else ("-inf" if math.isinf(v) else repr(v))
    return str(v)


def render_config(config: ExperimentConfig) -> str:
    lines = ["[experiment]"]
    for key in _EXPERIMENT_TYPES:
        lines.append(f"{key} = {_render_value(getattr(config, key))}")
    if config.env_params:
        lines += ["", "[env]"]
        lines += [f"{k} = {_render_value(v)}" for k, v in sorted(config.env_params.items())]
    for name, obj in (("neat", config.neat), ("transport", config.transport)):
        lines += ["", f"[{name}]"]
        lines += [f"{f.name} = {_render_value(getattr(obj, f.name))}" for f in fields(obj)]
    return "\n".join(lines) + "\n"
