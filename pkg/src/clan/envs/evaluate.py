"""Fitness evaluation of genomes on the task environments."""

from __future__ import annotations

from collections import OrderedDict

import numpy as np

from clan.envs import _rollouts
from clan.envs.base import EnvError, EnvSpec, EpisodeResult, EvalMode
from clan.envs.classic import CartPoleConstants, CartPoleEnv, MountainCarConstants, MountainCarEnv
from clan.envs.synthetic import SyntheticEnv, observation_matrix, target_vector
from clan.neat import rng as rngs
from clan.neat.cost import GeneOps, tally
from clan.neat.genome import ArityError, Genome, gene_count
from clan.neat.network import CompiledNetwork, compile_network, evaluate_network

_CARTPOLE_K = CartPoleConstants().array()
_MOUNTAIN_K = MountainCarConstants().array()
_OBS_CACHE: OrderedDict = OrderedDict()
_OBS_CACHE_SIZE = 16


def make_env(spec: EnvSpec):
    if spec.name == "cartpole":
        return CartPoleEnv(spec)
    if spec.name == "mountaincar":
        return MountainCarEnv(spec)
    if spec.name == "synthetic":
        return SyntheticEnv(spec)
    raise EnvError(f"unknown environment {spec.name!r}")


def episode_rng(seed: int, generation: int, episode: int) -> np.random.Generator:
    """Episodes are shared by every genome of a generation."""
    return rngs.stream(seed, rngs.EVAL, generation, episode)


def _check_arity(spec: EnvSpec, genome: Genome) -> None:
    n_in, n_out = len(genome.input_ids), len(genome.output_ids)
    if n_in != spec.observation_dim or n_out != spec.n_outputs:
        raise ArityError(
            f"genome has {n_in} inputs / {n_out} outputs, "
            f"{spec.name} needs {spec.observation_dim} / {spec.n_outputs}"
        )


def _observations(spec: EnvSpec, seed: int, generation: int, episode: int, steps: int) -> np.ndarray:
    key = (spec.observation_dim, seed, generation, episode, steps)
    obs = _OBS_CACHE.get(key)
    if obs is None:
        obs = observation_matrix(spec, episode_rng(seed, generation, episode), steps)
        _OBS_CACHE[key] = obs
        if len(_OBS_CACHE) > _OBS_CACHE_SIZE:
            _OBS_CACHE.popitem(last=False)
    return obs


def run_episode_fast(
    spec: EnvSpec, net: CompiledNetwork, *, seed: int, generation: int, episode: int, steps: int
) -> EpisodeResult:
    arrays = net.arrays()
    if spec.name == "cartpole":
        state = episode_rng(seed, generation, episode).uniform(-0.05, 0.05, size=4)
        total, n, early = _rollouts.cartpole(net.n_values, state, _CARTPOLE_K, steps, spec.flop_scale, *arrays)
    elif spec.name == "mountaincar":
        state = np.array([episode_rng(seed, generation, episode).uniform(-0.6, -0.4), 0.0])
        total, n, early = _rollouts.mountain_car(net.n_values, state, _MOUNTAIN_K, steps, spec.flop_scale, *arrays)
    elif spec.name == "synthetic":
        obs = _observations(spec, seed, generation, episode, steps)
        total, n, early = _rollouts.synthetic(net.n_values, obs, target_vector(spec), steps, spec.flop_scale, *arrays)
    else:
        raise EnvError(f"unknown environment {spec.name!r}")
    return EpisodeResult(float(total), int(n), bool(early))


def run_episode_reference(
    spec: EnvSpec, genome: Genome, *, seed: int, generation: int, episode: int, steps: int
) -> EpisodeResult:
    """Plain-Python episode: env.reset/step driven by evaluate_network."""
    env = make_env(spec)
    obs = env.reset(episode_rng(seed, generation, episode))
    total = 0.0
    for t in range(steps):
        out = evaluate_network(genome, obs)
        for _ in range(spec.flop_scale - 1):
            out = evaluate_network(genome, obs)
        if spec.action_kind == "discrete":
            action = max(range(len(out)), key=lambda j: (out[j], -j))
        else:
            action = out
        obs, reward, done = env.step(action)
        total += reward
        if env.terminated:
            return EpisodeResult(total, t + 1, True)
        if done:
            break
    return EpisodeResult(total, t + 1, False)


def evaluate_genome(
    spec: EnvSpec,
    genome: Genome,
    mode: EvalMode = EvalMode.MULTI_STEP,
    episodes: int | None = None,
    *,
    seed: int = 0,
    generation: int = 0,
    ops: GeneOps | None = None,
    fast: bool = True,
) -> float:
    """Mean episode reward. Single-step mode runs one episode of one step."""
    _check_arity(spec, genome)
    if mode == EvalMode.SINGLE_STEP:
        episodes, steps = 1, 1
    else:
        episodes = spec.episodes if episodes is None else episodes
        steps = spec.max_steps
    net = compile_network(genome) if fast else None
    total = 0.0
    for e in range(episodes):
        if fast:
            res = run_episode_fast(spec, net, seed=seed, generation=generation, episode=e, steps=steps)
        else:
            res = run_episode_reference(spec, genome, seed=seed, generation=generation, episode=e, steps=steps)
        tally(ops, res.steps_taken * spec.flop_scale * gene_count(genome))
        total += res.total_reward
    return total / episodes
