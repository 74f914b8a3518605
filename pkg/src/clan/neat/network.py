"""Feed-forward evaluation of genomes.

``evaluate_network`` is the straight reading of the genome. ``compile_network``
flattens the same computation into arrays for the jitted kernels in
``clan.neat._kernels``; both sum incoming edges in ascending source-node order
so they agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from clan.neat.genome import Activation, ArityError, Genome, NodeKind, topological_order

SIGMOID_SLOPE = 4.9
_CLAMP = 60.0


def activate(tag: int, x: float) -> float:
    if tag == Activation.SIGMOID:
        z = SIGMOID_SLOPE * x
        if z < -_CLAMP:
            z = -_CLAMP
        elif z > _CLAMP:
            z = _CLAMP
        return 1.0 / (1.0 + math.exp(-z))
    if tag == Activation.IDENTITY:
        return x
    if tag == Activation.TANH:
        return math.tanh(x)
    if tag == Activation.RELU:
        return x if x > 0.0 else 0.0
    raise ValueError(f"unknown activation tag {tag}")


def _incoming(genome: Genome) -> dict[int, list[tuple[int, float]]]:
    incoming: dict[int, list[tuple[int, float]]] = {nid: [] for nid in genome.nodes}
    for c in genome.connections.values():
        if c.enabled:
            incoming[c.out_node].append((c.in_node, c.weight))
    for edges in incoming.values():
        edges.sort()
    return incoming


def evaluate_network(genome: Genome, inputs: Sequence[float]) -> list[float]:
    input_ids = genome.input_ids
    if len(inputs) != len(input_ids):
        raise ArityError(f"expected {len(input_ids)} inputs, got {len(inputs)}")
    order = topological_order(genome)
    incoming = _incoming(genome)
    values = dict(zip(input_ids, (float(v) for v in inputs)))
    for nid in order:
        node = genome.nodes[nid]
        if node.kind == NodeKind.INPUT:
            continue
        total = node.bias
        for src, weight in incoming[nid]:
            total += weight * values[src]
        values[nid] = activate(node.activation, total)
    return [values[nid] for nid in genome.output_ids]


@dataclass(frozen=True)
class CompiledNetwork:
    n_values: int
    input_idx: np.ndarray
    output_idx: np.ndarray
    eval_idx: np.ndarray
    eval_bias: np.ndarray
    eval_act: np.ndarray
    edge_start: np.ndarray
    edge_end: np.ndarray
    edge_src: np.ndarray
    edge_w: np.ndarray
    genes: int

    def arrays(self) -> tuple:
        return (
            self.input_idx,
            self.output_idx,
            self.eval_idx,
            self.eval_bias,
            self.eval_act,
            self.edge_start,
            self.edge_end,
            self.edge_src,
            self.edge_w,
        )


def compile_network(genome: Genome) -> CompiledNetwork:
    order = topological_order(genome)
    index = {nid: i for i, nid in enumerate(order)}
    incoming = _incoming(genome)
    eval_nodes = [nid for nid in order if genome.nodes[nid].kind != NodeKind.INPUT]
    starts, ends, srcs, weights = [], [], [], []
    for nid in eval_nodes:
        starts.append(len(srcs))
        for src, w in incoming[nid]:
            srcs.append(index[src])
            weights.append(w)
        ends.append(len(srcs))
    return CompiledNetwork(
        n_values=len(order),
        input_idx=np.array([index[i] for i in genome.input_ids], dtype=np.int64),
        output_idx=np.array([index[i] for i in genome.output_ids], dtype=np.int64),
        eval_idx=np.array([index[i] for i in eval_nodes], dtype=np.int64),
        eval_bias=np.array([genome.nodes[i].bias for i in eval_nodes], dtype=np.float64),
        eval_act=np.array([int(genome.nodes[i].activation) for i in eval_nodes], dtype=np.int64),
        edge_start=np.array(starts, dtype=np.int64),
        edge_end=np.array(ends, dtype=np.int64),
        edge_src=np.array(srcs, dtype=np.int64),
        edge_w=np.array(weights, dtype=np.float64),
        genes=len(genome.nodes) + len(genome.connections),
    )


def forward_compiled(net: CompiledNetwork, inputs: Sequence[float]) -> np.ndarray:
    from clan.neat._kernels import forward

    x = np.asarray(inputs, dtype=np.float64)
    if x.shape != net.input_idx.shape:
        raise ArityError(f"expected {net.input_idx.size} inputs, got {x.size}")
    values = np.zeros(net.n_values)
    out = np.zeros(net.output_idx.size)
    forward(values, x, out, *net.arrays())
    return out
