"""Delivery ratio of a run: uploads attempted on the network leg against entries stored."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .channel import TelemetryService


@dataclass(frozen=True)
class DeliveryReport:
    attempted: int
    received: int
    expected: int | None = None
    success_ratio: Fraction | None = None

    @property
    def ratio_text(self) -> str:
        """Decimal rendering, or "undefined" when nothing was attempted"""
        if self.success_ratio is None:
            return "undefined"
        return f"{float(self.success_ratio):.4f}"

    def to_dict(self) -> dict:
        return {
            "attempted": self.attempted,
            "received": self.received,
            "expected": self.expected,
            "success_ratio": None if self.success_ratio is None else str(self.success_ratio),
            "success_ratio_decimal": self.ratio_text,
        }


def delivery_report(service: TelemetryService, channel_id: int, attempted: int,
                    expected_interval_s: float | None = None,
                    range_ms: tuple[int, int] | None = None) -> DeliveryReport:
    """received counts entries whose created_at lies in [start, end]; expected is floor(range / interval)"""
    entries = service.snapshot(channel_id)
    if range_ms is not None:
        start, end = range_ms
        entries = [e for e in entries if start <= e.created_at_ms <= end]
    expected = None
    if expected_interval_s and range_ms is not None:
        expected = int((range_ms[1] - range_ms[0]) // int(round(expected_interval_s * 1000)))
    ratio = Fraction(len(entries), attempted) if attempted > 0 else None
    return DeliveryReport(attempted=attempted, received=len(entries), expected=expected, success_ratio=ratio)
