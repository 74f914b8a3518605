"""Binary framing of messages.

Frame layout, little-endian::

    magic "CLAN" | version u8 | type u8 | sender u16 | receiver u16 |
    generation u32 | payload length u32 | payload | CRC32 u32

The CRC covers everything before it. An empty payload gives a 22-byte frame.
"""

from __future__ import annotations

import json
import math
import struct
import zlib

from clan.neat.innovation import InnovationRecord
from clan.neat.planning import WorkItem
from clan.neat.serialize import DecodeError, genome_from_bytes, genome_to_bytes
from clan.transport.message import (
    GENOME_CATEGORIES,
    FitnessReportBody,
    GenomesBody,
    InitBody,
    Message,
    MsgType,
    PlanBody,
    StopBody,
    TelemetryBody,
    WorkItemsBody,
)

MAGIC = b"CLAN"
VERSION = 1
HEAD = struct.Struct("<4sBBHHII")
CRC = struct.Struct("<I")
FRAME_OVERHEAD = HEAD.size + CRC.size
MAX_PAYLOAD = 1 << 30

_U8 = struct.Struct("<B")
_U32 = struct.Struct("<I")
_F64 = struct.Struct("<d")
_ITEM = struct.Struct("<IQQQB")
_FITNESS = struct.Struct("<Qd")
_SPAWN = struct.Struct("<QI")
_TELEMETRY = struct.Struct("<IddQIQQQBB")
_RECORD_HEAD = struct.Struct("<BBI")
_KINDS = ("node", "conn")


class WireError(DecodeError):
    pass


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, st: struct.Struct) -> tuple:
        if self.pos + st.size > len(self.data):
            raise WireError("payload truncated")
        out = st.unpack_from(self.data, self.pos)
        self.pos += st.size
        return out

    def raw(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise WireError("payload truncated")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def done(self) -> None:
        if self.pos != len(self.data):
            raise WireError(f"{len(self.data) - self.pos} trailing payload bytes")


def _pack_genomes(genomes, out: list[bytes]) -> None:
    out.append(_U32.pack(len(genomes)))
    for g in genomes:
        out.append(_F64.pack(math.nan if g.fitness is None else g.fitness))
        out.append(genome_to_bytes(g))


def _unpack_genomes(r: _Reader) -> list:
    (count,) = r.take(_U32)
    genomes = []
    for _ in range(count):
        (fitness,) = r.take(_F64)
        try:
            g, r.pos = genome_from_bytes(r.data, r.pos)
        except DecodeError as exc:
            raise WireError(str(exc)) from exc
        g.fitness = None if math.isnan(fitness) else fitness
        genomes.append(g)
    return genomes


def _pack_logs(logs, out: list[bytes]) -> None:
    for log in logs:
        out.append(_U32.pack(len(log)))
        for rec in log:
            out.append(_RECORD_HEAD.pack(_KINDS.index(rec.kind), len(rec.key), rec.innovation_id))
            out.extend(_U32.pack(part) for part in rec.key)


def _unpack_logs(r: _Reader, n: int) -> list[list[InnovationRecord]]:
    logs = []
    for _ in range(n):
        (count,) = r.take(_U32)
        log = []
        for _ in range(count):
            kind, nparts, innov = r.take(_RECORD_HEAD)
            if kind >= len(_KINDS):
                raise WireError(f"bad innovation kind {kind}")
            key = tuple(r.take(_U32)[0] for _ in range(nparts))
            log.append(InnovationRecord(_KINDS[kind], key, innov))
        logs.append(log)
    return logs


def encode_payload(msg: Message) -> bytes:
    b = msg.body
    out: list[bytes] = []
    t = msg.msg_type
    if t == MsgType.INIT:
        text = json.dumps(b.settings, sort_keys=True).encode()
        out.append(_U32.pack(len(text)))
        out.append(text)
        _pack_genomes(b.genomes, out)
    elif t == MsgType.GENOMES:
        out.append(_U8.pack(GENOME_CATEGORIES.index(b.category)))
        _pack_genomes(b.genomes, out)
        out.append(_U8.pack(b.logs is not None))
        if b.logs is not None:
            _pack_logs(b.logs, out)
    elif t == MsgType.WORK_ITEMS:
        out.append(_U32.pack(len(b.items)))
        out.extend(_ITEM.pack(i.child_index, i.genome_id, i.parent_a, i.parent_b, i.elite) for i in b.items)
    elif t == MsgType.FITNESS_REPORT:
        out.append(_U32.pack(len(b.entries)))
        out.extend(_FITNESS.pack(gid, f) for gid, f in b.entries)
    elif t == MsgType.PLAN:
        out.append(_U32.pack(len(b.spawn_counts)))
        out.extend(_SPAWN.pack(sid, n) for sid, n in sorted(b.spawn_counts.items()))
    elif t == MsgType.TELEMETRY:
        out.append(
            _TELEMETRY.pack(
                b.clan_id, b.best_fitness, b.mean_fitness, b.best_genome_id, b.species_count, b.gene_total,
                b.inference_ops, b.evolution_ops, b.solved, b.final,
            )
        )
    return b"".join(out)


def decode_payload(msg_type: MsgType, payload: bytes):
    r = _Reader(payload)
    if msg_type == MsgType.INIT:
        (n,) = r.take(_U32)
        try:
            settings = json.loads(r.raw(n).decode())
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise WireError(f"bad settings: {exc}") from exc
        body = InitBody(settings, _unpack_genomes(r))
    elif msg_type == MsgType.GENOMES:
        (cat,) = r.take(_U8)
        if cat >= len(GENOME_CATEGORIES):
            raise WireError(f"bad genome category {cat}")
        genomes = _unpack_genomes(r)
        (has_logs,) = r.take(_U8)
        logs = _unpack_logs(r, len(genomes)) if has_logs else None
        body = GenomesBody(GENOME_CATEGORIES[cat], genomes, logs)
    elif msg_type == MsgType.WORK_ITEMS:
        (n,) = r.take(_U32)
        items = []
        for _ in range(n):
            idx, gid, a, b, elite = r.take(_ITEM)
            items.append(WorkItem(idx, gid, a, b, bool(elite)))
        body = WorkItemsBody(items)
    elif msg_type == MsgType.FITNESS_REPORT:
        (n,) = r.take(_U32)
        body = FitnessReportBody([r.take(_FITNESS) for _ in range(n)])
    elif msg_type == MsgType.PLAN:
        (n,) = r.take(_U32)
        body = PlanBody(dict(r.take(_SPAWN) for _ in range(n)))
    elif msg_type == MsgType.TELEMETRY:
        f = r.take(_TELEMETRY)
        body = TelemetryBody(*f[:8], solved=bool(f[8]), final=bool(f[9]))
    else:
        body = StopBody()
    r.done()
    return body


def encode(msg: Message) -> bytes:
    payload = encode_payload(msg)
    head = HEAD.pack(MAGIC, VERSION, int(msg.msg_type), msg.sender, msg.receiver, msg.generation, len(payload))
    frame = head + payload
    return frame + CRC.pack(zlib.crc32(frame))


def frame_length(header: bytes) -> int:
    """Total frame size given at least the fixed header; validates magic and version."""
    magic, version, _, _, _, _, length = HEAD.unpack_from(header)
    if magic != MAGIC:
        raise WireError(f"bad magic {magic!r}")
    if version != VERSION:
        raise WireError(f"unsupported version {version}")
    if length > MAX_PAYLOAD:
        raise WireError(f"payload length {length} too large")
    return FRAME_OVERHEAD + length


def decode(frame: bytes) -> Message:
    if len(frame) < FRAME_OVERHEAD:
        raise WireError("frame shorter than header")
    total = frame_length(frame)
    if len(frame) != total:
        raise WireError(f"frame is {len(frame)} bytes, header says {total}")
    (crc,) = CRC.unpack_from(frame, total - CRC.size)
    if zlib.crc32(frame[: total - CRC.size]) != crc:
        raise WireError("CRC mismatch")
    _, _, mtype, sender, receiver, generation, _ = HEAD.unpack_from(frame)
    try:
        msg_type = MsgType(mtype)
    except ValueError:
        raise WireError(f"unknown message type {mtype}") from None
    body = decode_payload(msg_type, bytes(frame[HEAD.size : total - CRC.size]))
    return Message(msg_type, sender, receiver, generation, body)


def encoded_length(msg: Message) -> int:
    return FRAME_OVERHEAD + len(encode_payload(msg))
