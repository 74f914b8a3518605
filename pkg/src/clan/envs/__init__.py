"""Task environments and fitness evaluation."""

from clan.envs.base import EnvError, EnvSpec, EpisodeResult, EvalMode
from clan.envs.classic import CartPoleEnv, MountainCarEnv, cartpole, mountain_car
from clan.envs.evaluate import evaluate_genome, make_env, run_episode_fast, run_episode_reference
from clan.envs.synthetic import SyntheticEnv, synthetic_workload


def spec_by_name(name: str, **kwargs) -> EnvSpec:
    factories = {"cartpole": cartpole, "mountaincar": mountain_car, "synthetic": synthetic_workload}
    if name not in factories:
        raise EnvError(f"unknown environment {name!r}; choose from {sorted(factories)}")
    return factories[name](**kwargs)


__all__ = [
    "CartPoleEnv", "EnvError", "EnvSpec", "EpisodeResult", "EvalMode", "MountainCarEnv",
    "SyntheticEnv", "cartpole", "evaluate_genome", "make_env", "mountain_car",
    "run_episode_fast", "run_episode_reference", "spec_by_name", "synthetic_workload",
]
