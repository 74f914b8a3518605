"""Per-node, per-generation cost counters.

Compute is counted in gene operations, communication in genes and 32-bit
scalars (``cost_bytes``) as well as actual frame bytes, and time in
milliseconds split across inference, evolution, communication and idle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from clan.transport.message import BYTES_PER_GENE, CATEGORIES, Message

WALL = ("wall_ms_inference", "wall_ms_evolution", "wall_ms_comm", "wall_ms_idle")
COUNTERS = (
    "inference_gene_ops",
    "evolution_gene_ops",
    "genes_sent",
    "genes_received",
    "scalars_sent",
    "scalars_received",
    "cost_bytes_sent",
    "cost_bytes_received",
    "frame_bytes_sent",
    "frame_bytes_received",
    "messages_sent",
    "messages_received",
    *WALL,
    *(f"sent_{c}" for c in CATEGORIES),
)
_KNOWN = frozenset(COUNTERS)


class LedgerError(ValueError):
    pass


@dataclass
class AuditEntry:
    node: int
    generation: int
    counter: str
    amount: float


@dataclass
class CostLedger:
    audit: bool = False
    rows: dict[tuple[int, int], dict[str, float]] = field(default_factory=dict)
    closed: set[int] = field(default_factory=set)
    trail: list[AuditEntry] = field(default_factory=list)

    def row(self, node: int, generation: int) -> dict[str, float]:
        key = (node, generation)
        r = self.rows.get(key)
        if r is None:
            r = self.rows[key] = dict.fromkeys(COUNTERS, 0)
        return r

    def charge(self, node: int, generation: int, counter: str, amount: float) -> None:
        if counter not in _KNOWN:
            raise LedgerError(f"unknown ledger category {counter!r}")
        if amount < 0:
            raise LedgerError(f"negative charge {amount} to {counter}")
        if amount == 0:
            return
        self.row(node, generation)[counter] += amount
        if self.audit:
            self.trail.append(AuditEntry(node, generation, counter, amount))

    def charge_endpoint(self, msg: Message, frame_bytes: int, side: str) -> None:
        """Charge one message to its sender (``side="sent"``) or receiver."""
        if side not in ("sent", "received"):
            raise LedgerError(f"side must be 'sent' or 'received', not {side!r}")
        g = msg.generation
        node = msg.sender if side == "sent" else msg.receiver
        self.charge(node, g, f"genes_{side}", msg.payload_genes)
        self.charge(node, g, f"scalars_{side}", msg.scalars)
        self.charge(node, g, f"cost_bytes_{side}", msg.cost_bytes)
        self.charge(node, g, f"frame_bytes_{side}", frame_bytes)
        self.charge(node, g, f"messages_{side}", 1)
        if side == "sent":
            self.charge(node, g, f"sent_{msg.category}", msg.cost_bytes // BYTES_PER_GENE)

    def charge_message(self, msg: Message, frame_bytes: int) -> None:
        """Charge one delivered message to both endpoints."""
        self.charge_endpoint(msg, frame_bytes, "sent")
        self.charge_endpoint(msg, frame_bytes, "received")

    def close_generation(self, generation: int) -> None:
        self.closed.add(generation)

    @property
    def generations(self) -> list[int]:
        return sorted({g for _, g in self.rows} | self.closed)

    @property
    def nodes(self) -> list[int]:
        return sorted({n for n, _ in self.rows})

    def total(self, counter: str, generation: int | None = None, node: int | None = None) -> float:
        return sum(
            r[counter]
            for (n, g), r in self.rows.items()
            if (generation is None or g == generation) and (node is None or n == node)
        )

    def global_row(self, generation: int) -> dict[str, float]:
        out = dict.fromkeys(COUNTERS, 0)
        for (_, g), r in self.rows.items():
            if g == generation:
                for k, v in r.items():
                    out[k] += v
        return out

    def genes_communicated(self, generation: int) -> int:
        return int(self.total("cost_bytes_sent", generation)) // BYTES_PER_GENE

    def genome_genes_sent(self, generation: int) -> int:
        return int(self.total("genes_sent", generation))

    def merge(self, other: CostLedger) -> CostLedger:
        """Sum of two ledgers; neither input is modified."""
        out = CostLedger(audit=self.audit or other.audit)
        for src in (self, other):
            for key, r in src.rows.items():
                dst = out.row(*key)
                for k, v in r.items():
                    dst[k] += v
            out.trail.extend(src.trail)
        out.closed = self.closed | other.closed
        return out

    def node_view(self, node: int) -> CostLedger:
        out = CostLedger(audit=self.audit)
        out.rows = {k: dict(v) for k, v in self.rows.items() if k[0] == node}
        out.closed = set(self.closed)
        return out

    def records(self) -> list[dict]:
        """One flat record per (node, generation), ordered by generation then node."""
        return [
            {"generation": g, "node": n, **self.rows[(n, g)]}
            for n, g in sorted(self.rows, key=lambda k: (k[1], k[0]))
        ]


def merge_all(ledgers) -> CostLedger:
    out = CostLedger()
    for ledger in ledgers:
        out = out.merge(ledger)
    return out
