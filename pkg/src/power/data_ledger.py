"""Mobile-data accounting for uploads and its decimal-unit projection.

Every HTTP attempt is charged, delivered or not: the radio spends the bytes
either way. 1 KB = 1000 B and 1 MB = 1000 KB.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from util.units import ureg

from .battery import MS_PER_HOUR, BatteryState

# 123 700 B/h over 75 uploads/h, rounded
PER_UPLOAD_BYTES = 1649


@dataclass(frozen=True)
class DataEvent:
    t_ms: int
    bytes: int
    kind: str = "upload"
    delivered: bool = True

    def to_record(self) -> dict:
        return {"t_ms": self.t_ms, "bytes": self.bytes, "kind": self.kind, "delivered": self.delivered}


@dataclass(frozen=True)
class DataLedger:
    per_upload_bytes: int = PER_UPLOAD_BYTES
    events: tuple[DataEvent, ...] = ()

    @property
    def bytes_sent(self) -> int:
        return sum(e.bytes for e in self.events)

    @property
    def uploads(self) -> int:
        return sum(1 for e in self.events if e.kind == "upload")

    @property
    def delivered(self) -> int:
        return sum(1 for e in self.events if e.kind == "upload" and e.delivered)


def record_upload(ledger: DataLedger, t_ms: int, attempted: bool = True, delivered: bool = True) -> DataLedger:
    """Charge one upload attempt. `attempted=False` leaves the ledger as it is"""
    if not attempted:
        return ledger
    if ledger.events and t_ms < ledger.events[-1].t_ms:
        raise ValueError(f"ledger events must be recorded in time order: {t_ms} < {ledger.events[-1].t_ms}")
    event = DataEvent(t_ms=t_ms, bytes=ledger.per_upload_bytes, delivered=delivered)
    return replace(ledger, events=ledger.events + (event,))


@dataclass(frozen=True)
class Projection:
    bytes_observed: int
    window_ms: int
    kb_per_hour: Fraction
    mb_per_day: Fraction

    def quantities(self) -> dict:
        return {
            "kb_per_hour": ureg.Quantity(float(self.kb_per_hour), "kilobyte / hour"),
            "mb_per_day": ureg.Quantity(float(self.mb_per_day), "megabyte / day"),
        }


def projection_report(ledger: DataLedger, window_ms: int) -> Projection:
    """Linear extrapolation of the bytes observed over window_ms. A zero window projects nothing"""
    if window_ms < 0:
        raise ValueError(f"window must not be negative, got {window_ms} ms")
    observed = ledger.bytes_sent
    if window_ms == 0:
        return Projection(observed, 0, Fraction(0), Fraction(0))
    kb_per_hour = Fraction(observed * MS_PER_HOUR, window_ms) / 1000
    return Projection(observed, window_ms, kb_per_hour, kb_per_hour * 24 / 1000)


def power_report(battery: BatteryState, ledger: DataLedger, window_ms: int,
                 attempts: int | None = None, delivered: int | None = None) -> dict:
    """Flat JSON-ready summary of endurance and data use"""
    projection = projection_report(ledger, window_ms)
    return {
        "endurance_hours": float(battery.endurance_hours),
        "kb_per_hour": round(float(projection.kb_per_hour), 6),
        "mb_per_day": round(float(projection.mb_per_day), 6),
        "attempts": ledger.uploads if attempts is None else attempts,
        "delivered": ledger.delivered if delivered is None else delivered,
    }
