"""Stream-socket transport: one center listening, agents dialing in.

Connections start with an 8-byte hello (magic, version, role, agent id) that
the center answers with one status byte. After that both sides exchange
whole frames; a reader thread per connection decodes incoming frames into a
queue so node programs can block on or poll for messages.
"""

from __future__ import annotations

import logging
import os
import queue
import socket
import struct
import threading
import time
from typing import Generator

from clan.metrics import ledger as cost_ledger  # module import: ledger imports transport.message
from clan.transport import wire
from clan.transport.effects import Compute, Poll, Recv, Send
from clan.transport.message import Message

log = logging.getLogger(__name__)

DEFAULT_PORT = int(os.environ.get("CLAN_PORT", "47000"))
HELLO = struct.Struct("<4sBBH")
ROLE_AGENT = 1
OK, BAD_VERSION, DUPLICATE_ID, BAD_ID, BAD_HELLO = range(5)
_STATUS_TEXT = {
    BAD_VERSION: "unsupported protocol version",
    DUPLICATE_ID: "agent id already registered",
    BAD_ID: "agent id out of range",
    BAD_HELLO: "malformed hello",
}


class TransportError(RuntimeError):
    pass


class HandshakeError(TransportError):
    pass


def recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise TransportError("connection closed by peer")
        buf += chunk
    return bytes(buf)


def send_frame(sock: socket.socket, frame: bytes) -> None:
    sock.sendall(frame)


def recv_frame(sock: socket.socket) -> bytes:
    head = recv_exact(sock, wire.HEAD.size)
    total = wire.frame_length(head)
    return head + recv_exact(sock, total - wire.HEAD.size)


def hello(agent_id: int, version: int = wire.VERSION) -> bytes:
    return HELLO.pack(wire.MAGIC, version, ROLE_AGENT, agent_id)


class _Peer:
    def __init__(self, node_id: int, sock: socket.socket, inbox: queue.Queue):
        self.node_id = node_id
        self.sock = sock
        self.lock = threading.Lock()
        self.thread = threading.Thread(target=self._read, args=(inbox,), daemon=True)
        self.closed = False

    def start(self) -> None:
        self.thread.start()

    def _read(self, inbox: queue.Queue) -> None:
        try:
            while True:
                frame = recv_frame(self.sock)
                inbox.put((wire.decode(frame), len(frame)))
        except (OSError, TransportError, wire.WireError) as exc:
            if not self.closed:
                inbox.put(TransportError(f"link to node {self.node_id} failed: {exc}"))

    def send(self, frame: bytes) -> None:
        with self.lock:
            try:
                send_frame(self.sock, frame)
            except OSError as exc:
                raise TransportError(f"send to node {self.node_id} failed: {exc}") from exc

    def close(self) -> None:
        self.closed = True
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self.sock.close()


class Endpoint:
    """One node's view of the socket network."""

    def __init__(self, node_id: int):
        self.node_id = node_id
        self.inbox: queue.Queue = queue.Queue()
        self.peers: dict[int, _Peer] = {}

    def send(self, msg: Message) -> int:
        peer = self.peers.get(msg.receiver)
        if peer is None:
            raise TransportError(f"no connection to node {msg.receiver}")
        frame = wire.encode(msg)
        peer.send(frame)
        return len(frame)

    def recv(self, timeout: float | None) -> tuple[Message, int]:
        try:
            item = self.inbox.get(timeout=timeout)
        except queue.Empty:
            raise TransportError(f"no message within {timeout} s") from None
        if isinstance(item, Exception):
            raise item
        return item

    def poll(self) -> tuple[Message, int] | None:
        try:
            item = self.inbox.get_nowait()
        except queue.Empty:
            return None
        if isinstance(item, Exception):
            raise item
        return item

    def linger(self, timeout: float) -> None:
        """Wait for peers to hang up so frames already sent are not reset."""
        deadline = time.monotonic() + timeout
        for p in self.peers.values():
            p.thread.join(max(deadline - time.monotonic(), 0.0))

    def close(self) -> None:
        for p in self.peers.values():
            p.close()


class CenterEndpoint(Endpoint):
    def __init__(self, host: str, port: int, n_agents: int, *, accept_timeout: float = 30.0):
        super().__init__(0)
        self.n_agents = n_agents
        self.listener = socket.create_server((host, port), reuse_port=False)
        self.listener.settimeout(0.2)
        self.address = self.listener.getsockname()
        self.accept_timeout = accept_timeout

    def _admit(self, sock: socket.socket) -> int | None:
        sock.settimeout(5.0)
        try:
            magic, version, role, agent_id = HELLO.unpack(recv_exact(sock, HELLO.size))
        except (OSError, TransportError, struct.error):
            sock.close()
            return None
        if magic != wire.MAGIC or role != ROLE_AGENT:
            status = BAD_HELLO
        elif version != wire.VERSION:
            status = BAD_VERSION
        elif not 1 <= agent_id <= self.n_agents:
            status = BAD_ID
        elif agent_id in self.peers:
            status = DUPLICATE_ID
        else:
            status = OK
        try:
            sock.sendall(bytes([status]))
        except OSError:
            status = BAD_HELLO
        if status != OK:
            log.warning("rejected agent %s: %s", agent_id, _STATUS_TEXT.get(status))
            sock.close()
            return None
        sock.settimeout(None)
        peer = _Peer(agent_id, sock, self.inbox)
        self.peers[agent_id] = peer
        peer.start()
        log.info("agent %d registered", agent_id)
        return agent_id

    def wait_for_agents(self) -> None:
        deadline = time.monotonic() + self.accept_timeout
        while len(self.peers) < self.n_agents:
            if time.monotonic() > deadline:
                self.close()
                raise TransportError(
                    f"only {len(self.peers)} of {self.n_agents} agents connected within {self.accept_timeout} s"
                )
            try:
                sock, _ = self.listener.accept()
            except socket.timeout:
                continue
            self._admit(sock)

    def close(self) -> None:
        super().close()
        self.listener.close()


class AgentEndpoint(Endpoint):
    def __init__(self, host: str, port: int, agent_id: int, *, connect_timeout: float = 30.0,
                 version: int = wire.VERSION):
        super().__init__(agent_id)
        deadline = time.monotonic() + connect_timeout
        while True:
            try:
                sock = socket.create_connection((host, port), timeout=5.0)
                break
            except OSError as exc:
                if time.monotonic() > deadline:
                    raise TransportError(f"cannot reach center at {host}:{port}: {exc}") from exc
                time.sleep(0.1)
        try:
            sock.sendall(hello(agent_id, version))
            status = recv_exact(sock, 1)[0]
        except (OSError, TransportError) as exc:
            sock.close()
            raise HandshakeError(f"handshake failed: {exc}") from exc
        if status != OK:
            sock.close()
            raise HandshakeError(f"center rejected agent {agent_id}: {_STATUS_TEXT.get(status, status)}")
        sock.settimeout(None)
        peer = _Peer(0, sock, self.inbox)
        self.peers[0] = peer
        peer.start()


def drive(program: Generator, endpoint: Endpoint, ledger: cost_ledger.CostLedger | None = None,
          *, recv_timeout: float | None = 300.0):
    """Run a node program over real sockets, timing it with the wall clock."""
    ledger = ledger if ledger is not None else cost_ledger.CostLedger()
    me = endpoint.node_id
    value = None
    mark = time.perf_counter()
    while True:
        try:
            req = program.send(value)
        except StopIteration as stop:
            return stop.value
        value = None
        if isinstance(req, Send):
            size = endpoint.send(req.message)
            ledger.charge_endpoint(req.message, size, "sent")
        elif isinstance(req, (Recv, Poll)):
            started = time.perf_counter()
            got = endpoint.recv(recv_timeout) if isinstance(req, Recv) else endpoint.poll()
            if got is not None:
                msg, size = got
                ledger.charge_endpoint(msg, size, "received")
                value = msg
            if isinstance(req, Recv):
                ledger.charge(me, req.generation, "wall_ms_comm", (time.perf_counter() - started) * 1000)
        elif isinstance(req, Compute):
            now = time.perf_counter()
            ledger.charge(me, req.generation, f"{req.kind}_gene_ops", req.gene_ops)
            ledger.charge(me, req.generation, f"wall_ms_{req.kind}", (now - mark) * 1000)
        else:
            raise TransportError(f"unexpected request {req!r}")
        mark = time.perf_counter()
