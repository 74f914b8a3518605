"""Messages, wire framing, simulated and socket networks."""

from clan.transport.effects import Compute, Poll, Recv, Send
from clan.transport.message import Message, MsgType
from clan.transport.sim import ComputeModel, LinkModel, SimNetwork
from clan.transport.wire import WireError, decode, encode

__all__ = [
    "Compute", "ComputeModel", "LinkModel", "Message", "MsgType", "Poll", "Recv", "Send",
    "SimNetwork", "WireError", "decode", "encode",
]
