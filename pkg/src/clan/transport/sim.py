"""Deterministic discrete-event simulation of a shared network link.

Every message crosses one shared medium. It starts transmitting once the
medium is free and the sender's previous message has been delivered, holds
the medium for ``frame_bits / bandwidth`` and arrives ``latency`` later.
Compute time is modelled from gene operations, so a run's schedule and ledger
depend only on its inputs.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import Generator

from clan.metrics import ledger as cost_ledger  # module import: ledger imports transport.message
from clan.transport import wire
from clan.transport.effects import EVOLUTION, INFERENCE, Compute, Poll, Recv, Send
from clan.transport.message import Message

DEFAULT_BANDWIDTH = 62.24e6  # bits per second
DEFAULT_LATENCY = 8.83e-3  # seconds per message


class SimError(RuntimeError):
    pass


@dataclass(frozen=True)
class LinkModel:
    bandwidth: float = DEFAULT_BANDWIDTH
    base_latency: float = DEFAULT_LATENCY

    def __post_init__(self) -> None:
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        if self.base_latency < 0:
            raise ValueError("base_latency must be >= 0")

    def transmission_time(self, frame_bytes: int) -> float:
        return frame_bytes * 8 / self.bandwidth

    def delivery_delay(self, frame_bytes: int) -> float:
        """Time from start of transmission to arrival on an idle link."""
        return self.base_latency + self.transmission_time(frame_bytes)

    def scaled(self, factor: float) -> LinkModel:
        """Multiply both cost terms by ``factor``."""
        return LinkModel(self.bandwidth / factor, self.base_latency * factor)


@dataclass(frozen=True)
class ComputeModel:
    """Seconds charged per gene operation of each kind."""

    inference_s_per_gene: float = 2e-7
    evolution_s_per_gene: float = 1e-6

    def seconds(self, kind: str, gene_ops: int) -> float:
        if kind == INFERENCE:
            return gene_ops * self.inference_s_per_gene
        if kind == EVOLUTION:
            return gene_ops * self.evolution_s_per_gene
        raise ValueError(f"unknown compute kind {kind!r}")


@dataclass
class Delivery:
    message: Message
    sent_at: float
    tx_start: float
    delivered_at: float
    frame_bytes: int


@dataclass
class _Node:
    node_id: int
    program: Generator
    clock: float = 0.0
    inbox: deque = field(default_factory=deque)
    waiting: Recv | None = None
    wait_start: float = 0.0
    outbox_free: float = 0.0
    done: bool = False


_DELIVER, _RESUME = 0, 1


class SimNetwork:
    def __init__(
        self,
        link: LinkModel = LinkModel(),
        compute: ComputeModel = ComputeModel(),
        ledger: cost_ledger.CostLedger | None = None,
        *,
        wire_roundtrip: bool = True,
    ):
        self.wire_roundtrip = wire_roundtrip
        self.link = link
        self.compute = compute
        self.ledger = ledger if ledger is not None else cost_ledger.CostLedger()
        self.nodes: dict[int, _Node] = {}
        self.log: list[Delivery] = []
        self.medium_free = 0.0
        self._events: list = []
        self._seq = 0

    def add_node(self, node_id: int, program: Generator) -> None:
        if node_id in self.nodes:
            raise SimError(f"duplicate node id {node_id}")
        self.nodes[node_id] = _Node(node_id, program)
        self._push(0.0, _RESUME, node_id, None)

    def _push(self, time: float, kind: int, node_id: int, payload) -> None:
        heapq.heappush(self._events, (time, kind, node_id, self._seq, payload))
        self._seq += 1

    def _wall(self, node: int, generation: int, kind: str, seconds: float) -> None:
        self.ledger.charge(node, generation, f"wall_ms_{kind}", seconds * 1000.0)

    def deliver_time(self, sender: int, frame_bytes: int, now: float) -> tuple[float, float]:
        """Reserve the medium for one frame; return (transmission start, arrival)."""
        node = self.nodes[sender]
        start = max(now, self.medium_free, node.outbox_free)
        end = start + self.link.transmission_time(frame_bytes)
        self.medium_free = end
        arrival = end + self.link.base_latency
        node.outbox_free = arrival
        return start, arrival

    def _send(self, node: _Node, msg: Message) -> None:
        if msg.sender != node.node_id:
            raise SimError(f"node {node.node_id} sent a message as {msg.sender}")
        if msg.receiver not in self.nodes:
            raise SimError(f"message to unknown node {msg.receiver}")
        if self.wire_roundtrip:
            # receivers get a decoded copy, exactly what a socket would hand them
            frame = wire.encode(msg)
            size = len(frame)
            msg = wire.decode(frame)
        else:
            size = wire.encoded_length(msg)
        start, arrival = self.deliver_time(node.node_id, size, node.clock)
        self.ledger.charge_message(msg, size)
        d = Delivery(msg, node.clock, start, arrival, size)
        self.log.append(d)
        self._push(arrival, _DELIVER, msg.sender, d)

    def _take(self, node: _Node) -> Delivery | None:
        return node.inbox.popleft() if node.inbox else None

    def _step(self, node: _Node, value) -> None:
        """Advance one node's program until it blocks or finishes."""
        while True:
            try:
                req = node.program.send(value)
            except StopIteration:
                node.done = True
                return
            if isinstance(req, Send):
                self._send(node, req.message)
                value = None
            elif isinstance(req, Poll):
                d = self._take(node)
                value = d.message if d else None
            elif isinstance(req, Recv):
                d = self._take(node)
                if d is None:
                    node.waiting = req
                    node.wait_start = node.clock
                    return
                value = d.message
            elif isinstance(req, Compute):
                seconds = self.compute.seconds(req.kind, req.gene_ops)
                self.ledger.charge(node.node_id, req.generation, f"{req.kind}_gene_ops", req.gene_ops)
                self._wall(node.node_id, req.generation, req.kind, seconds)
                self._push(node.clock + seconds, _RESUME, node.node_id, None)
                return
            else:
                raise SimError(f"node {node.node_id} yielded {req!r}")

    def run(self, until: float | None = None) -> float:
        """Process events until none remain; return the final clock."""
        now = 0.0
        while self._events:
            if until is not None and self._events[0][0] > until:
                break
            time, kind, node_id, _, payload = heapq.heappop(self._events)
            now = time
            if kind == _RESUME:
                node = self.nodes[node_id]
                node.clock = time
                self._step(node, None)
                continue
            d: Delivery = payload
            node = self.nodes[d.message.receiver]
            if node.done:
                continue
            node.inbox.append(d)
            if node.waiting is not None:
                req, node.waiting = node.waiting, None
                wait = time - node.wait_start
                on_wire = min(wait, time - d.tx_start)
                self._wall(node.node_id, req.generation, "comm", on_wire)
                self._wall(node.node_id, req.generation, "idle", wait - on_wire)
                node.clock = time
                self._step(node, self._take(node).message)
        stuck = [n.node_id for n in self.nodes.values() if not n.done and n.waiting is not None]
        if stuck and until is None:
            raise SimError(f"deadlock: nodes {stuck} wait for messages that never come")
        return now
