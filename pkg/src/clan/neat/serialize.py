"""Canonical binary and JSON forms of a genome.

Binary layout, little-endian::

    header      genome_id u64 | node count u32 | connection count u32
    node        id u32 | kind u8 | bias f64 | activation u8
    connection  innovation_id u32 | in u32 | out u32 | weight f64 | enabled u8

Genes are written in ascending id order. Fitness is not part of the genome
encoding; messages carry it alongside when needed.
"""

from __future__ import annotations

import json
import struct

from clan.neat.genome import Activation, ConnectionGene, Genome, NodeGene, NodeKind

HEADER = struct.Struct("<QII")
NODE = struct.Struct("<IBdB")
CONN = struct.Struct("<IIIdB")


class DecodeError(ValueError):
    pass


def encoded_size(genome: Genome) -> int:
    return HEADER.size + NODE.size * len(genome.nodes) + CONN.size * len(genome.connections)


def genome_to_bytes(genome: Genome) -> bytes:
    parts = [HEADER.pack(genome.genome_id, len(genome.nodes), len(genome.connections))]
    for nid in sorted(genome.nodes):
        n = genome.nodes[nid]
        parts.append(NODE.pack(n.id, int(n.kind), n.bias, int(n.activation)))
    for innov in sorted(genome.connections):
        c = genome.connections[innov]
        parts.append(CONN.pack(c.innovation_id, c.in_node, c.out_node, c.weight, int(c.enabled)))
    return b"".join(parts)


def genome_from_bytes(data: bytes | memoryview, offset: int = 0) -> tuple[Genome, int]:
    """Decode one genome starting at ``offset``; return it and the end offset."""
    try:
        genome_id, n_nodes, n_conns = HEADER.unpack_from(data, offset)
        offset += HEADER.size
        end_nodes = offset + NODE.size * n_nodes
        end = end_nodes + CONN.size * n_conns
        if end > len(data):
            raise DecodeError("genome record truncated")
        nodes = {}
        for nid, kind, bias, act in NODE.iter_unpack(data[offset:end_nodes]):
            nodes[nid] = NodeGene(nid, NodeKind(kind), bias, Activation(act))
        connections = {}
        for innov, a, b, w, en in CONN.iter_unpack(data[end_nodes:end]):
            connections[innov] = ConnectionGene(innov, a, b, w, bool(en))
    except (struct.error, ValueError) as exc:
        if isinstance(exc, DecodeError):
            raise
        raise DecodeError(str(exc)) from exc
    return Genome(genome_id, nodes, connections), end


def genome_to_dict(genome: Genome) -> dict:
    return {
        "genome_id": genome.genome_id,
        "nodes": [
            {
                "id": n.id,
                "kind": n.kind.name.lower(),
                "bias": n.bias,
                "activation": n.activation.name.lower(),
            }
            for _, n in sorted(genome.nodes.items())
        ],
        "connections": [
            {
                "innovation_id": c.innovation_id,
                "in_node": c.in_node,
                "out_node": c.out_node,
                "weight": c.weight,
                "enabled": c.enabled,
            }
            for _, c in sorted(genome.connections.items())
        ],
        "fitness": genome.fitness,
    }


def genome_from_dict(data: dict) -> Genome:
    nodes = {
        n["id"]: NodeGene(n["id"], NodeKind[n["kind"].upper()], n["bias"], Activation.from_name(n["activation"]))
        for n in data["nodes"]
    }
    connections = {
        c["innovation_id"]: ConnectionGene(c["innovation_id"], c["in_node"], c["out_node"], c["weight"], c["enabled"])
        for c in data["connections"]
    }
    return Genome(data["genome_id"], nodes, connections, data.get("fitness"))


def genome_to_json(genome: Genome) -> str:
    return json.dumps(genome_to_dict(genome), indent=2)


def genome_from_json(text: str) -> Genome:
    return genome_from_dict(json.loads(text))
