"""CartPole and MountainCar with the standard benchmark dynamics."""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass

import numpy as np

from clan.envs.base import EnvError, EnvSpec


@dataclass(frozen=True)
class CartPoleConstants:
    gravity: float = 9.8
    masscart: float = 1.0
    masspole: float = 0.1
    length: float = 0.5  # half the pole length
    force_mag: float = 10.0
    tau: float = 0.02
    theta_threshold: float = 12 * 2 * math.pi / 360
    x_threshold: float = 2.4

    def array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=np.float64)


@dataclass(frozen=True)
class MountainCarConstants:
    force: float = 0.001
    gravity: float = 0.0025
    min_position: float = -1.2
    max_position: float = 0.6
    max_speed: float = 0.07
    goal_position: float = 0.5
    goal_velocity: float = 0.0

    def array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=np.float64)


def cartpole(max_steps: int = 200, solved_threshold: float = 195.0, episodes: int = 3) -> EnvSpec:
    return EnvSpec("cartpole", 4, "discrete", 2, max_steps, solved_threshold, episodes)


def mountain_car(max_steps: int = 200, solved_threshold: float = -110.0, episodes: int = 3) -> EnvSpec:
    return EnvSpec("mountaincar", 2, "discrete", 3, max_steps, solved_threshold, episodes)


def cartpole_step(state: tuple[float, float, float, float], action: int, k: CartPoleConstants):
    """One Euler tick. Returns the new state and whether the episode ended."""
    x, x_dot, theta, theta_dot = state
    force = k.force_mag if action == 1 else -k.force_mag
    costheta = math.cos(theta)
    sintheta = math.sin(theta)
    total_mass = k.masspole + k.masscart
    polemass_length = k.masspole * k.length
    temp = (force + polemass_length * theta_dot * theta_dot * sintheta) / total_mass
    thetaacc = (k.gravity * sintheta - costheta * temp) / (
        k.length * (4.0 / 3.0 - k.masspole * costheta * costheta / total_mass)
    )
    xacc = temp - polemass_length * thetaacc * costheta / total_mass
    x = x + k.tau * x_dot
    x_dot = x_dot + k.tau * xacc
    theta = theta + k.tau * theta_dot
    theta_dot = theta_dot + k.tau * thetaacc
    done = x < -k.x_threshold or x > k.x_threshold or theta < -k.theta_threshold or theta > k.theta_threshold
    return (x, x_dot, theta, theta_dot), done


def mountain_car_step(state: tuple[float, float], action: int, k: MountainCarConstants):
    position, velocity = state
    velocity += (action - 1) * k.force + math.cos(3 * position) * (-k.gravity)
    velocity = min(max(velocity, -k.max_speed), k.max_speed)
    position += velocity
    position = min(max(position, k.min_position), k.max_position)
    if position == k.min_position and velocity < 0:
        velocity = 0.0
    done = position >= k.goal_position and velocity >= k.goal_velocity
    return (position, velocity), done


class CartPoleEnv:
    def __init__(self, spec: EnvSpec, constants: CartPoleConstants = CartPoleConstants()):
        self.spec = spec
        self.k = constants
        self.state = None
        self.t = 0
        self.terminated = False

    def reset(self, rng: np.random.Generator) -> list[float]:
        self.state = tuple(float(v) for v in rng.uniform(-0.05, 0.05, size=4))
        self.t = 0
        return list(self.state)

    def step(self, action: int):
        if self.state is None:
            raise EnvError("step() before reset()")
        if action not in (0, 1):
            raise EnvError(f"invalid CartPole action {action!r}")
        self.state, done = cartpole_step(self.state, action, self.k)
        self.t += 1
        self.terminated = done
        obs = list(self.state)
        truncated = self.t >= self.spec.max_steps
        if done or truncated:
            self.state = None
        return obs, 1.0, done or truncated


class MountainCarEnv:
    def __init__(self, spec: EnvSpec, constants: MountainCarConstants = MountainCarConstants()):
        self.spec = spec
        self.k = constants
        self.state = None
        self.t = 0
        self.terminated = False

    def reset(self, rng: np.random.Generator) -> list[float]:
        self.state = (float(rng.uniform(-0.6, -0.4)), 0.0)
        self.t = 0
        return list(self.state)

    def step(self, action: int):
        if self.state is None:
            raise EnvError("step() before reset()")
        if action not in (0, 1, 2):
            raise EnvError(f"invalid MountainCar action {action!r}")
        self.state, done = mountain_car_step(self.state, action, self.k)
        self.t += 1
        self.terminated = done
        obs = list(self.state)
        truncated = self.t >= self.spec.max_steps
        if done or truncated:
            self.state = None
        return obs, -1.0, done or truncated
