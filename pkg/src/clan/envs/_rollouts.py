"""Jitted episode loops. Each mirrors the step function of its Python env."""

import math

import numpy as np
from numba import njit

from clan.neat._kernels import forward


@njit(cache=True)
def _argmax(out):
    best = 0
    for j in range(1, out.shape[0]):
        if out[j] > out[best]:
            best = j
    return best


@njit(cache=True)
def cartpole(n_values, state0, k, max_steps, repeats,
             input_idx, output_idx, eval_idx, eval_bias, eval_act,
             edge_start, edge_end, edge_src, edge_w):
    gravity, masscart, masspole, length, force_mag, tau, theta_thr, x_thr = (
        k[0], k[1], k[2], k[3], k[4], k[5], k[6], k[7])
    values = np.zeros(n_values)
    out = np.zeros(output_idx.shape[0])
    obs = state0.copy()
    x, x_dot, theta, theta_dot = obs[0], obs[1], obs[2], obs[3]
    total = 0.0
    for t in range(max_steps):
        for _ in range(repeats):
            forward(values, obs, out, input_idx, output_idx, eval_idx, eval_bias, eval_act,
                    edge_start, edge_end, edge_src, edge_w)
        force = force_mag if _argmax(out) == 1 else -force_mag
        costheta = math.cos(theta)
        sintheta = math.sin(theta)
        total_mass = masspole + masscart
        polemass_length = masspole * length
        temp = (force + polemass_length * theta_dot * theta_dot * sintheta) / total_mass
        thetaacc = (gravity * sintheta - costheta * temp) / (
            length * (4.0 / 3.0 - masspole * costheta * costheta / total_mass))
        xacc = temp - polemass_length * thetaacc * costheta / total_mass
        x = x + tau * x_dot
        x_dot = x_dot + tau * xacc
        theta = theta + tau * theta_dot
        theta_dot = theta_dot + tau * thetaacc
        total += 1.0
        if x < -x_thr or x > x_thr or theta < -theta_thr or theta > theta_thr:
            return total, t + 1, True
        obs[0] = x
        obs[1] = x_dot
        obs[2] = theta
        obs[3] = theta_dot
    return total, max_steps, False


@njit(cache=True)
def mountain_car(n_values, state0, k, max_steps, repeats,
                 input_idx, output_idx, eval_idx, eval_bias, eval_act,
                 edge_start, edge_end, edge_src, edge_w):
    force_k, gravity, min_pos, max_pos, max_speed, goal_pos, goal_vel = (
        k[0], k[1], k[2], k[3], k[4], k[5], k[6])
    values = np.zeros(n_values)
    out = np.zeros(output_idx.shape[0])
    obs = state0.copy()
    position, velocity = obs[0], obs[1]
    total = 0.0
    for t in range(max_steps):
        for _ in range(repeats):
            forward(values, obs, out, input_idx, output_idx, eval_idx, eval_bias, eval_act,
                    edge_start, edge_end, edge_src, edge_w)
        action = _argmax(out)
        velocity += (action - 1) * force_k + math.cos(3 * position) * (-gravity)
        velocity = min(max(velocity, -max_speed), max_speed)
        position += velocity
        position = min(max(position, min_pos), max_pos)
        if position == min_pos and velocity < 0:
            velocity = 0.0
        total += -1.0
        if position >= goal_pos and velocity >= goal_vel:
            return total, t + 1, True
        obs[0] = position
        obs[1] = velocity
    return total, max_steps, False


@njit(cache=True)
def synthetic(n_values, observations, target, max_steps, repeats,
              input_idx, output_idx, eval_idx, eval_bias, eval_act,
              edge_start, edge_end, edge_src, edge_w):
    values = np.zeros(n_values)
    out = np.zeros(output_idx.shape[0])
    total = 0.0
    for t in range(max_steps):
        for _ in range(repeats):
            forward(values, observations[t], out, input_idx, output_idx, eval_idx, eval_bias,
                    eval_act, edge_start, edge_end, edge_src, edge_w)
        step_total = 0.0
        for j in range(target.shape[0]):
            d = out[j] - target[j]
            step_total += d * d
        total += -step_total
    return total, max_steps, False
