from __future__ import annotations

import pytest
from conftest import make_genome

from clan.neat.innovation import InnovationRecord
from clan.neat.planning import WorkItem
from clan.transport import wire
from clan.transport.message import (
    CHILD_GENOMES, FitnessReportBody, GenomesBody, InitBody, Message, MsgType, PlanBody, TelemetryBody,
    WorkItemsBody, stop,
)


def test_stop_frame_is_22_bytes():
    frame = wire.encode(stop(0, 3, 17))
    assert len(frame) == 22 == wire.FRAME_OVERHEAD
    assert wire.HEAD.unpack_from(frame)[-1] == 0
    back = wire.decode(frame)
    assert (back.msg_type, back.sender, back.receiver, back.generation) == (MsgType.STOP, 0, 3, 17)


def _samples():
    g = make_genome(5, hidden=(9,), conns=[(3, 0, 9, -1.5), (4, 9, 2, 0.25, False)], fitness=2.5)
    h = make_genome(6)
    log = [InnovationRecord("node", (3,), 0xFFFF0000), InnovationRecord("conn", (0, 0xFFFF0000), 0xFFFF0001)]
    return [
        Message(MsgType.INIT, 0, 1, 0, InitBody({"a": 1, "b": [1, 2]}, [g, h])),
        Message(MsgType.GENOMES, 1, 0, 4, GenomesBody(CHILD_GENOMES, [g, h], [log, []])),
        Message(MsgType.WORK_ITEMS, 0, 2, 4, WorkItemsBody([WorkItem(0, 7, 3, 3, True), WorkItem(1, 8, 3, 4)])),
        Message(MsgType.FITNESS_REPORT, 2, 0, 4, FitnessReportBody([(7, -1.25), (8, 200.0)])),
        Message(MsgType.PLAN, 0, 1, 4, PlanBody({3: 10, 9: 140})),
        Message(MsgType.TELEMETRY, 1, 0, 4, TelemetryBody(2, 1.5, 0.5, 77, 3, 400, 10, 5, True, False)),
    ]


@pytest.mark.parametrize("msg", _samples(), ids=lambda m: m.msg_type.name)
def test_round_trip(msg):
    frame = wire.encode(msg)
    assert len(frame) == wire.encoded_length(msg)
    assert wire.decode(frame) == msg


def test_unevaluated_fitness_survives():
    g = make_genome(1)
    back = wire.decode(wire.encode(Message(MsgType.INIT, 0, 1, 0, InitBody({}, [g]))))
    assert back.body.genomes[0].fitness is None


@pytest.mark.parametrize("pos", [-1, -4, 0, 5, 30])
def test_corruption_detected(pos):
    frame = bytearray(wire.encode(_samples()[3]))
    frame[pos] ^= 0x40
    with pytest.raises(wire.WireError):
        wire.decode(bytes(frame))


def test_truncated_and_bad_version():
    frame = wire.encode(_samples()[0])
    with pytest.raises(wire.WireError):
        wire.decode(frame[:-1])
    with pytest.raises(wire.WireError):
        wire.decode(frame[:10])
    bad = bytearray(frame)
    bad[4] = 9
    with pytest.raises(wire.WireError, match="version"):
        wire.frame_length(bytes(bad))


def test_message_cost_units():
    g = make_genome(5, hidden=(9,), conns=[(3, 0, 9, -1.5), (4, 9, 2, 0.25, False)], fitness=2.5)
    m = Message(MsgType.GENOMES, 0, 1, 0, GenomesBody(CHILD_GENOMES, [g]))
    assert m.payload_genes == 6 and m.scalars == 1 and m.cost_bytes == 28
    with pytest.raises(TypeError):
        Message(MsgType.STOP, 0, 1, 0, PlanBody({}))
