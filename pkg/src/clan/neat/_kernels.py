"""Jitted forward pass over a CompiledNetwork's arrays."""

import math

from numba import njit

_SIGMOID = 0
_IDENTITY = 1
_TANH = 2
_RELU = 3


@njit(cache=True)
def activate(tag, x):
    if tag == _SIGMOID:
        z = 4.9 * x
        if z < -60.0:
            z = -60.0
        elif z > 60.0:
            z = 60.0
        return 1.0 / (1.0 + math.exp(-z))
    if tag == _IDENTITY:
        return x
    if tag == _TANH:
        return math.tanh(x)
    if x > 0.0:
        return x
    return 0.0


@njit(cache=True)
def forward(values, inputs, out, input_idx, output_idx, eval_idx, eval_bias, eval_act,
            edge_start, edge_end, edge_src, edge_w):
    for i in range(input_idx.shape[0]):
        values[input_idx[i]] = inputs[i]
    for k in range(eval_idx.shape[0]):
        total = eval_bias[k]
        for e in range(edge_start[k], edge_end[k]):
            total += edge_w[e] * values[edge_src[e]]
        values[eval_idx[k]] = activate(eval_act[k], total)
    for j in range(output_idx.shape[0]):
        out[j] = values[output_idx[j]]
