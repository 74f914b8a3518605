"""Cost ledger, generation reports and scaling extrapolation."""

from clan.metrics.ledger import COUNTERS, CostLedger, LedgerError, merge_all
from clan.metrics.report import emit_csv, emit_jsonl, generation_report
from clan.metrics.scaling import ScalingError, ScalingModel, fit_scaling

__all__ = [
    "COUNTERS", "CostLedger", "LedgerError", "ScalingError", "ScalingModel",
    "emit_csv", "emit_jsonl", "fit_scaling", "generation_report", "merge_all",
]
