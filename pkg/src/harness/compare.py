"""Run metrics against the published reference figures of the prototype."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

import pandas as pd

from util.units import format_value

from .run_report import RunReport

# relative tolerance for measured quantities; counts must match exactly
TOLERANCE = Fraction(5, 1000)
MS_PER_HOUR = 3_600_000


@dataclass(frozen=True)
class ReferenceMetric:
    metric: str
    label: str
    reference_value: Fraction
    exact: bool = False
    decimals: int = 0


REFERENCE = (
    ReferenceMetric("endurance_hours", "Battery endurance (h)", Fraction(9), decimals=1),
    ReferenceMetric("uploads_attempted_per_hour", "Uploads attempted per hour", Fraction(75), exact=True),
    ReferenceMetric("uploads_received_per_hour", "Uploads received per hour", Fraction(73), exact=True),
    ReferenceMetric("success_ratio", "Delivery ratio", Fraction(73, 75), decimals=4),
    ReferenceMetric("kb_per_hour", "Mobile data (KB/h)", Fraction("123.70"), decimals=3),
    ReferenceMetric("mb_per_day", "Mobile data (MB/day)", Fraction("2.9688"), decimals=4),
)


@dataclass(frozen=True)
class ComparisonRow:
    metric: str
    label: str
    reference_value: Fraction
    run_value: Fraction | None
    relative_delta: Fraction | None
    flagged: bool
    decimals: int = 0

    @property
    def run_text(self) -> str:
        return format_value(self.run_value, self.decimals)

    @property
    def reference_text(self) -> str:
        return format_value(self.reference_value, self.decimals)

    @property
    def delta_text(self) -> str:
        if self.relative_delta is None:
            return "undefined"
        return f"{float(self.relative_delta) * 100:+.3f}%"


def _per_hour(count: int, duration_ms: int) -> Fraction | None:
    if duration_ms <= 0:
        return None
    return Fraction(count * MS_PER_HOUR, duration_ms)


def run_values(report: RunReport) -> dict[str, Fraction | None]:
    return {
        "endurance_hours": report.endurance_hours,
        "uploads_attempted_per_hour": _per_hour(report.uploads_attempted, report.end_ms),
        "uploads_received_per_hour": _per_hour(report.uploads_received, report.end_ms),
        "success_ratio": report.success_ratio,
        "kb_per_hour": report.kb_per_hour,
        "mb_per_day": report.mb_per_day,
    }


def compare_to_reference(report: RunReport) -> list[ComparisonRow]:
    """One row per reference metric. Undefined run values are always flagged"""
    values = run_values(report)
    rows = []
    for ref in REFERENCE:
        value = values[ref.metric]
        if value is None:
            rows.append(ComparisonRow(ref.metric, ref.label, ref.reference_value, None, None, True, ref.decimals))
            continue
        delta = (value - ref.reference_value) / ref.reference_value
        flagged = value != ref.reference_value if ref.exact else abs(delta) > TOLERANCE
        rows.append(ComparisonRow(ref.metric, ref.label, ref.reference_value, value, delta, flagged, ref.decimals))
    return rows


def deltas(rows: Sequence[ComparisonRow]) -> dict[str, float | None]:
    return {r.metric: None if r.relative_delta is None else round(float(r.relative_delta), 8) for r in rows}


def comparison_frame(rows: Sequence[ComparisonRow]) -> pd.DataFrame:
    return pd.DataFrame({
        "metric": [r.metric for r in rows],
        "reference": [r.reference_text for r in rows],
        "run": [r.run_text for r in rows],
        "relative_delta": [r.delta_text for r in rows],
        "flagged": [r.flagged for r in rows],
    })
