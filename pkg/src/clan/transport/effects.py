"""Requests a node program yields to whichever runtime drives it.

Node logic is written as generators so the same code runs under the
discrete-event simulator and over real sockets::

    msg = yield Recv(generation)
    yield Compute("inference", gene_ops, generation)
    yield Send(reply)
    maybe = yield Poll()
"""

from __future__ import annotations

from dataclasses import dataclass

from clan.transport.message import Message

INFERENCE = "inference"
EVOLUTION = "evolution"


@dataclass(frozen=True)
class Send:
    message: Message


@dataclass(frozen=True)
class Recv:
    """Block until a message arrives; waiting time is charged to ``generation``."""

    generation: int


@dataclass(frozen=True)
class Poll:
    """Return an already-delivered message, or None without waiting."""


@dataclass(frozen=True)
class Compute:
    """Report work just done, measured in gene operations."""

    kind: str
    gene_ops: int
    generation: int
