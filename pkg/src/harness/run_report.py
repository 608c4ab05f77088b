"""Outcome of one simulated run, as written to report.json."""
from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction

from device import AlertEvent, BpmClass, GeoFix


def _fraction(value) -> Fraction | None:
    return None if value is None else Fraction(str(value))


def _alert_from_dict(data: Mapping) -> AlertEvent:
    fix = data["fix"]
    return AlertEvent(
        t_ms=data["t_ms"],
        kind=BpmClass(data["kind"]),
        bpm=data["bpm"],
        spo2_pct=data["spo2_pct"],
        fix=GeoFix(lat=fix["lat"], lon=fix["lon"], valid=fix["valid"], t_ms=fix["t_ms"]),
        url=data.get("url"),
    )


@dataclass(frozen=True)
class RunReport:
    scenario: str
    seed: int
    duration_ms: int
    end_ms: int
    uploads_attempted: int
    uploads_received: int
    success_ratio: Fraction | None
    alerts: tuple[AlertEvent, ...]
    sms_sent: int
    endurance_hours: Fraction
    kb_per_hour: Fraction
    mb_per_day: Fraction
    readings_good: int = 0
    fifo_overflows: int = 0
    battery_depleted_at_ms: int | None = None
    # mean |bpm - generator target| over readings whose window lies in one contact segment
    oracle_bpm_mae: float | None = None
    oracle_readings: int = 0
    deltas: dict[str, float | None] = field(default_factory=dict)

    def __post_init__(self):
        if self.uploads_received > self.uploads_attempted:
            raise ValueError(f"received {self.uploads_received} exceeds attempted {self.uploads_attempted}")

    @property
    def ratio_text(self) -> str:
        if self.success_ratio is None:
            return "undefined"
        return f"{float(self.success_ratio):.4f}"

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "duration_ms": self.duration_ms,
            "end_ms": self.end_ms,
            "uploads_attempted": self.uploads_attempted,
            "uploads_received": self.uploads_received,
            "success_ratio": None if self.success_ratio is None else str(self.success_ratio),
            "success_ratio_decimal": self.ratio_text,
            "alerts": [a.to_dict() for a in self.alerts],
            "sms_sent": self.sms_sent,
            "endurance_hours": str(self.endurance_hours),
            "kb_per_hour": str(self.kb_per_hour),
            "kb_per_hour_decimal": round(float(self.kb_per_hour), 6),
            "mb_per_day": str(self.mb_per_day),
            "mb_per_day_decimal": round(float(self.mb_per_day), 6),
            "readings_good": self.readings_good,
            "fifo_overflows": self.fifo_overflows,
            "battery_depleted_at_ms": self.battery_depleted_at_ms,
            "oracle_bpm_mae": self.oracle_bpm_mae,
            "oracle_readings": self.oracle_readings,
            "deltas": dict(self.deltas),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> RunReport:
        return cls(
            scenario=data["scenario"],
            seed=data["seed"],
            duration_ms=data["duration_ms"],
            end_ms=data["end_ms"],
            uploads_attempted=data["uploads_attempted"],
            uploads_received=data["uploads_received"],
            success_ratio=_fraction(data.get("success_ratio")),
            alerts=tuple(_alert_from_dict(a) for a in data.get("alerts", [])),
            sms_sent=data["sms_sent"],
            endurance_hours=Fraction(str(data["endurance_hours"])),
            kb_per_hour=Fraction(str(data["kb_per_hour"])),
            mb_per_day=Fraction(str(data["mb_per_day"])),
            readings_good=data.get("readings_good", 0),
            fifo_overflows=data.get("fifo_overflows", 0),
            battery_depleted_at_ms=data.get("battery_depleted_at_ms"),
            oracle_bpm_mae=data.get("oracle_bpm_mae"),
            oracle_readings=data.get("oracle_readings", 0),
            deltas=dict(data.get("deltas", {})),
        )
