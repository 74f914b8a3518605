from __future__ import annotations

import pytest

from clan.metrics.ledger import CostLedger
from clan.transport import wire
from clan.transport.effects import Compute, Recv, Send
from clan.transport.message import FitnessReportBody, Message, MsgType, stop
from clan.transport.sim import ComputeModel, LinkModel, SimError, SimNetwork


def test_default_64_byte_delay():
    # 8.83 ms measured for 64 B plus 512 bits at 62.24 Mbps
    assert LinkModel().delivery_delay(64) == pytest.approx(8.83e-3 + 512 / 62.24e6, rel=1e-12)
    assert LinkModel().delivery_delay(64) == pytest.approx(8.838e-3, abs=1e-6)


def test_scaled_link():
    link = LinkModel(1e6, 1e-3).scaled(2)
    assert link.bandwidth == 5e5 and link.base_latency == 2e-3


def _pair(sender_msgs, receive_count):
    got = []

    def a():
        for m in sender_msgs:
            yield Send(m)

    def b():
        for _ in range(receive_count):
            got.append((yield Recv(0)))

    return a, b, got


def test_zero_latency_arrival_is_transmission_time():
    msg = stop(0, 1, 0)
    a, b, got = _pair([msg], 1)
    net = SimNetwork(LinkModel(8000.0, 0.0))
    net.add_node(0, a())
    net.add_node(1, b())
    net.run()
    assert net.log[0].delivered_at == pytest.approx(22 * 8 / 8000.0)
    assert got == [msg]


def test_shared_medium_serializes_frames():
    msgs = [stop(0, 1, 0), stop(0, 1, 0)]
    a, b, _ = _pair(msgs, 2)
    net = SimNetwork(LinkModel(8000.0, 0.5))
    net.add_node(0, a())
    net.add_node(1, b())
    net.run()
    first, second = net.log
    assert second.tx_start >= first.delivered_at
    assert second.delivered_at == pytest.approx(2 * (0.022 + 0.5))


def test_compute_time_and_ledger():
    ledger = CostLedger()

    def worker():
        yield Compute("inference", 1000, 3)
        yield Send(Message(MsgType.FITNESS_REPORT, 1, 0, 3, FitnessReportBody([(1, 2.0)])))

    def center():
        yield Recv(3)

    net = SimNetwork(LinkModel(1e6, 0.01), ComputeModel(1e-3, 0.0), ledger)
    net.add_node(0, center())
    net.add_node(1, worker())
    end = net.run()
    size = len(wire.encode(Message(MsgType.FITNESS_REPORT, 1, 0, 3, FitnessReportBody([(1, 2.0)]))))
    assert end == pytest.approx(1.0 + size * 8 / 1e6 + 0.01)
    assert ledger.row(1, 3)["inference_gene_ops"] == 1000
    assert ledger.row(1, 3)["wall_ms_inference"] == pytest.approx(1000.0)
    center_row = ledger.row(0, 3)
    assert center_row["wall_ms_comm"] + center_row["wall_ms_idle"] == pytest.approx(end * 1000)
    assert center_row["messages_received"] == 1 and ledger.row(1, 3)["messages_sent"] == 1


def test_deadlock_reported():
    def waiter():
        yield Recv(0)

    net = SimNetwork()
    net.add_node(0, waiter())
    with pytest.raises(SimError, match="deadlock"):
        net.run()


def test_determinism():
    def run():
        a, b, got = _pair([stop(0, 1, i) for i in range(20)], 20)
        net = SimNetwork()
        net.add_node(0, a())
        net.add_node(1, b())
        return net.run(), [d.delivered_at for d in net.log]

    assert run() == run()
