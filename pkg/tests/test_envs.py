from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest
from conftest import make_genome

from clan.envs import (
    CartPoleEnv, EnvError, EvalMode, MountainCarEnv, SyntheticEnv, cartpole, evaluate_genome, mountain_car,
    run_episode_fast, run_episode_reference, spec_by_name, synthetic_workload,
)
from clan.envs.classic import CartPoleConstants, cartpole_step, mountain_car_step, MountainCarConstants
from clan.neat.config import NeatConfig
from clan.neat.cost import GeneOps
from clan.neat.genome import ArityError, gene_count
from clan.neat.network import compile_network
from clan.neat.population import Population


def test_cartpole_reset_bounds():
    env = CartPoleEnv(cartpole())
    for s in range(50):
        obs = env.reset(np.random.default_rng(s))
        assert len(obs) == 4 and all(-0.05 <= v <= 0.05 for v in obs)


def test_mountaincar_reset_bounds():
    env = MountainCarEnv(mountain_car())
    for s in range(50):
        pos, vel = env.reset(np.random.default_rng(s))
        assert -0.6 <= pos <= -0.4 and vel == 0.0


def test_synthetic_reset_is_zero():
    env = SyntheticEnv(synthetic_workload(obs_dim=16))
    assert env.reset(np.random.default_rng(0)) == [0.0] * 16


def test_cartpole_step_against_hand_physics():
    # push right from rest, written out for this one state
    total_mass = 1.1
    temp = 10.0 / total_mass
    thetaacc = -temp / (0.5 * (4.0 / 3.0 - 0.1 / total_mass))
    xacc = temp - 0.05 * thetaacc / total_mass
    state, done = cartpole_step((0.0, 0.0, 0.0, 0.0), 1, CartPoleConstants())
    assert state == pytest.approx((0.0, 0.02 * xacc, 0.0, 0.02 * thetaacc), rel=1e-15, abs=0)
    assert not done


def test_cartpole_termination_keeps_reward():
    env = CartPoleEnv(cartpole())
    env.reset(np.random.default_rng(0))
    env.state = (0.0, 0.0, 13 * math.pi / 180, 0.0)
    _, reward, done = env.step(1)
    assert done and reward == 1.0 and env.terminated


def test_mountaincar_goal_terminates():
    (pos, vel), done = mountain_car_step((0.49, 0.05), 2, MountainCarConstants())
    assert pos >= 0.5 and done


def test_step_validation():
    env = CartPoleEnv(cartpole())
    with pytest.raises(EnvError):
        env.step(0)
    env.reset(np.random.default_rng(0))
    with pytest.raises(EnvError):
        env.step(2)


def _constant_action_genome():
    # no connections: outputs tie at 0.5 so argmax picks action 0
    return make_genome(inputs=(0, 1, 2, 3), outputs=(4, 5))


def test_constant_policy_reward_bounds_and_determinism():
    g = _constant_action_genome()
    f = evaluate_genome(cartpole(), g, seed=3)
    assert 1 <= f <= 200
    assert f == evaluate_genome(cartpole(), g, seed=3)


def test_mountaincar_random_networks_score_minus_200():
    pop = Population.create(NeatConfig(population_size=10), n_inputs=2, n_outputs=3, seed=0)
    for g in pop.genomes:
        assert evaluate_genome(mountain_car(), g, seed=1) == -200.0


def test_arity_mismatch():
    with pytest.raises(ArityError):
        evaluate_genome(cartpole(), make_genome())


@pytest.mark.parametrize("spec", [cartpole(), mountain_car(), synthetic_workload(obs_dim=6, steps=20)])
def test_fast_and_reference_episodes_agree(spec):
    pop = Population.create(NeatConfig(population_size=12), n_inputs=spec.observation_dim,
                            n_outputs=spec.action_n, seed=2)
    for g in pop.genomes:
        for ep in range(2):
            kw = dict(seed=5, generation=1, episode=ep, steps=spec.max_steps)
            assert run_episode_fast(spec, compile_network(g), **kw) == run_episode_reference(spec, g, **kw)


def test_inference_ops_counted_per_step():
    spec = synthetic_workload(obs_dim=128, steps=200)
    g = Population.create(NeatConfig(population_size=2), n_inputs=128, n_outputs=4, seed=0).genomes[0]
    ops = GeneOps()
    evaluate_genome(spec, g, ops=ops)
    assert ops.count == 200 * gene_count(g)
    single = GeneOps()
    evaluate_genome(replace(spec, max_steps=1), g, EvalMode.SINGLE_STEP, ops=single)
    assert single.count == gene_count(g)


def test_spec_by_name():
    assert spec_by_name("cartpole").max_steps == 200
    assert spec_by_name("synthetic", obs_dim=8).observation_dim == 8
    with pytest.raises(EnvError):
        spec_by_name("lunarlander")
