from __future__ import annotations

import math

import numpy as np
import pytest
from conftest import make_genome

from clan.neat.genome import Activation, ArityError, NodeKind
from clan.neat.network import SIGMOID_SLOPE, compile_network, evaluate_network, forward_compiled
from clan.neat.population import Population
from clan.neat.config import NeatConfig


def test_zero_weights_give_half():
    g = make_genome(inputs=(0, 1, 2), outputs=(3, 4), conns=[(10, 0, 3, 0.0), (11, 1, 4, 0.0), (12, 2, 3, 0.0)])
    for x in ([0, 0, 0], [1.5, -3.0, 9.0]):
        assert evaluate_network(g, x) == [0.5, 0.5]


def test_identity_pass_through():
    g = make_genome(inputs=(0,), outputs=(1,), conns=[(5, 0, 1, 1.0)], act=Activation.IDENTITY)
    assert evaluate_network(g, [0.7]) == [0.7]


def test_hidden_node_matches_hand_evaluation():
    g = make_genome(
        inputs=(0, 1), outputs=(3,), hidden=(2,),
        conns=[(10, 0, 2, 0.5), (11, 1, 2, -1.25), (12, 2, 3, 2.0), (13, 0, 3, 0.3)],
    )
    g.nodes[2].bias = 0.1
    g.nodes[3].bias = -0.2
    x0, x1 = 0.8, 0.4

    def sig(z):
        return 1.0 / (1.0 + math.exp(-4.9 * z))

    h = sig(0.1 + 0.5 * x0 - 1.25 * x1)
    expected = sig(-0.2 + 2.0 * h + 0.3 * x0)
    assert evaluate_network(g, [x0, x1]) == pytest.approx([expected], abs=1e-15)


def test_disabled_connection_ignored():
    g = make_genome(inputs=(0,), outputs=(1,), conns=[(5, 0, 1, 3.0, False)], act=Activation.IDENTITY)
    assert evaluate_network(g, [2.0]) == [0.0]


def test_sigmoid_slope_and_clamp():
    g = make_genome(inputs=(0,), outputs=(1,), conns=[(5, 0, 1, 1.0)])
    assert SIGMOID_SLOPE == 4.9
    assert evaluate_network(g, [1e6]) == [1.0 / (1.0 + math.exp(-60.0))]


def test_arity_checked():
    g = make_genome()
    with pytest.raises(ArityError):
        evaluate_network(g, [1.0])
    with pytest.raises(ArityError):
        forward_compiled(compile_network(g), [1.0, 2.0, 3.0])


def test_compiled_kernel_matches_python_bit_for_bit():
    cfg = NeatConfig(population_size=30, p_add_node=0.5, p_add_conn=0.5)
    pop = Population.create(cfg, n_inputs=5, n_outputs=3, seed=4)
    r = np.random.default_rng(0)
    for gen in range(6):
        for g in pop.genomes:
            g.fitness = float(r.random())
        for g in pop.genomes:
            x = r.uniform(-2, 2, size=5)
            assert list(forward_compiled(compile_network(g), x)) == evaluate_network(g, list(x))
        pop.step()
    assert any(pop.genomes[i].hidden_ids for i in range(len(pop.genomes)))
    assert all(n.kind != NodeKind.INPUT or n.bias == 0.0 for g in pop.genomes for n in g.nodes.values())
