from __future__ import annotations

import math

import pytest
from conftest import make_genome

from clan.metrics import ledger as ledger_mod
from clan.metrics.ledger import CostLedger, LedgerError, merge_all
from clan.metrics.report import emit_csv, generation_report, read_csv
from clan.metrics.scaling import ScalingError, fit_scaling
from clan.neat.genome import gene_count
from clan.transport.message import CHILD_GENOMES, GenomesBody, Message, MsgType, stop


def test_genome_message_recount():
    genomes = [make_genome(i, hidden=tuple(range(3, 3 + i)), conns=[(9, 0, 2, 1.0)]) for i in range(5)]
    msg = Message(MsgType.GENOMES, 1, 0, 2, GenomesBody(CHILD_GENOMES, genomes))
    ledger = CostLedger()
    ledger.charge_message(msg, 100)
    assert ledger.row(1, 2)["genes_sent"] == sum(gene_count(g) for g in genomes)
    assert ledger.row(0, 2)["genes_received"] == ledger.row(1, 2)["genes_sent"]
    assert ledger.row(1, 2)["sent_child_genomes"] == msg.genes_communicated


def test_charge_guards():
    ledger = CostLedger(audit=True)
    ledger.charge(0, 0, "genes_sent", 0)
    assert ledger.rows == {} and ledger.trail == []
    with pytest.raises(LedgerError):
        ledger.charge(0, 0, "genes_sent", -1)
    with pytest.raises(LedgerError):
        ledger.charge(0, 0, "bogus", 1)
    ledger.charge(0, 0, "genes_sent", 3)
    assert len(ledger.trail) == 1


def test_merge_adds_rows():
    a, b = CostLedger(), CostLedger()
    a.charge(0, 0, "messages_sent", 2)
    b.charge(0, 0, "messages_sent", 3)
    b.charge(1, 1, "messages_sent", 1)
    merged = merge_all([a, b])
    assert merged.row(0, 0)["messages_sent"] == 5 and merged.total("messages_sent") == 6
    assert a.total("messages_sent") == 2


def _ledger(gens=3, nodes=2):
    ledger = CostLedger()
    for g in range(gens):
        for n in range(nodes):
            ledger.charge(n, g, "inference_gene_ops", 100 * (g + 1))
            ledger.charge(n, g, "evolution_gene_ops", 5)
            ledger.charge(n, g, "wall_ms_inference", 3.0)
            ledger.charge(n, g, "wall_ms_comm", 1.0)
        ledger.charge_message(stop(0, 1, g), 22)
        ledger.close_generation(g)
    return ledger


def test_generation_report():
    rep = generation_report(_ledger(), 1)
    assert rep["inference_evolution_ratio"] == 40.0
    assert rep["genes_communicated"] == 0
    assert rep["inference_share"] == pytest.approx(0.75)
    with pytest.raises(LedgerError):
        generation_report(CostLedger(), 0)


def test_csv_rows_and_determinism(tmp_path):
    path = emit_csv(_ledger().records(), tmp_path / "a.csv")
    rows = read_csv(path)
    assert len(rows) == 6
    assert path.read_bytes() == emit_csv(_ledger().records(), tmp_path / "b.csv").read_bytes()
    assert path.read_bytes().count(b"\r\n") == 7


def test_empty_csv_is_header_only(tmp_path):
    path = emit_csv([], tmp_path / "e.csv")
    assert path.read_text().strip().split(",")[:2] == ["generation", "node"]
    assert read_csv(path) == []


def test_scaling_recovers_own_family():
    a, b, c, d = 12.5, 0.75, 0.2, 0.035
    ns = [1, 2, 4, 8, 16]
    model = fit_scaling(ns, [a / n + b for n in ns], [c + d * n for n in ns])
    for got, want in zip((model.a, model.b, model.c, model.d), (a, b, c, d)):
        assert abs(got - want) <= 1e-9 * abs(want)
    best = math.sqrt(a / d)
    assert model.stagnation_n in (math.floor(best), math.ceil(best))
    assert all(model.total(model.stagnation_n) <= model.total(k) for k in range(1, 200))
    assert model.worse_than_serial_n == math.floor(a / d) + 1
    assert model.total(model.worse_than_serial_n) > model.total(1) >= model.total(model.worse_than_serial_n - 1)


def test_scaling_monotone_totals_flagged():
    ns = [1, 2, 4, 8]
    model = fit_scaling(ns, [10 / n for n in ns], [0.5] * 4)
    assert model.stagnation_n == 8 and model.beyond_observed_range and model.worse_than_serial_n is None


def test_scaling_input_errors():
    with pytest.raises(ScalingError):
        fit_scaling([1, 2], [1, 2], [1, 2])
    with pytest.raises(ScalingError):
        fit_scaling([1, 1, 1, 2], [1, 1, 1, 1], [1, 1, 1, 1])
    with pytest.raises(ScalingError):
        fit_scaling([1, 2, 3], [1, 2], [1, 2, 3])


def test_counter_names_cover_categories():
    assert {f"sent_{c}" for c in ("parent_genomes", "child_genomes", "init_genomes")} <= set(ledger_mod.COUNTERS)
