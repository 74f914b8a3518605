"""Generation summaries and CSV / JSON-lines emission."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from clan.metrics.ledger import COUNTERS, WALL, CostLedger, LedgerError

RECORD_COLUMNS = ("generation", "node", *COUNTERS)


def generation_report(ledger: CostLedger, generation: int) -> dict:
    """Totals over all nodes for one closed generation, plus derived shares."""
    if generation not in ledger.closed:
        raise LedgerError(f"generation {generation} is not complete")
    row = ledger.global_row(generation)
    wall = sum(row[k] for k in WALL)
    shares = {f"{k[len('wall_ms_'):]}_share": (row[k] / wall if wall > 0 else 0.0) for k in WALL}
    evo = row["evolution_gene_ops"]
    return {
        "generation": generation,
        **row,
        "genes_communicated": ledger.genes_communicated(generation),
        "wall_ms_total": wall,
        **shares,
        "inference_evolution_ratio": row["inference_gene_ops"] / evo if evo else float("inf"),
    }


def _fmt(value) -> str:
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return repr(value) if isinstance(value, float) else str(value)


def emit_csv(records, path: str | Path, columns=RECORD_COLUMNS) -> Path:
    """Header plus one row per record, columns in the given order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
        w.writerow(columns)
        for rec in records:
            w.writerow([_fmt(rec.get(c, "")) for c in columns])
    return path


def emit_jsonl(records, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return path


def read_csv(path: str | Path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))
