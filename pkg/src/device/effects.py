"""Effects emitted by the firmware state machine.

Effects are immutable values. The communication link executes SendSms and
HttpUpdate; the harness logs every effect as one JSON object per line with
fields t_ms, type and the type-specific payload (body, to, url, params).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
from typing import ClassVar
from urllib.parse import urlencode

from .geo import GeoFix

THINGSPEAK_HOST = "http://api.thingspeak.com"


class BpmClass(StrEnum):
    NORMAL = "Normal"
    BRADYCARDIA = "Bradycardia"
    TACHYCARDIA = "Tachycardia"


@dataclass(frozen=True)
class AlertEvent:
    t_ms: int
    kind: BpmClass
    bpm: int
    spo2_pct: int
    fix: GeoFix
    url: str | None

    def to_dict(self) -> dict:
        return {
            "t_ms": self.t_ms,
            "kind": str(self.kind),
            "bpm": self.bpm,
            "spo2_pct": self.spo2_pct,
            "fix": {"lat": self.fix.lat, "lon": self.fix.lon, "valid": self.fix.valid, "t_ms": self.fix.t_ms},
            "url": self.url,
        }


@dataclass(frozen=True)
class Effect:
    t_ms: int
    type: ClassVar[str] = "Effect"

    def payload(self) -> dict:
        return {}

    def to_record(self) -> dict:
        return {"t_ms": self.t_ms, "type": self.type, **self.payload()}


@dataclass(frozen=True)
class DisplayEvent(Effect):
    """Text lines shown on the OLED"""
    lines: tuple[str, ...] = ()
    type: ClassVar[str] = "DisplayEvent"

    def payload(self) -> dict:
        return {"body": " | ".join(self.lines)}


@dataclass(frozen=True)
class SendSms(Effect):
    to: str = ""
    body: str = ""
    reason: str = "alert"
    type: ClassVar[str] = "SendSms"

    def payload(self) -> dict:
        return {"to": self.to, "body": self.body}


@dataclass(frozen=True)
class HttpUpdate(Effect):
    """ThingSpeak channel update; query keeps parameter order"""
    path: str = "/update"
    query: tuple[tuple[str, str], ...] = ()
    type: ClassVar[str] = "HttpUpdate"

    @property
    def params(self) -> dict[str, str]:
        return dict(self.query)

    @property
    def request_target(self) -> str:
        return f"{self.path}?{urlencode(self.query)}"

    @property
    def url(self) -> str:
        return THINGSPEAK_HOST + self.request_target

    def payload(self) -> dict:
        return {"url": self.request_target, "params": self.params}


@dataclass(frozen=True)
class ConfigChanged(Effect):
    command: str = ""
    type: ClassVar[str] = "ConfigChanged"

    def payload(self) -> dict:
        return {"body": self.command}


@dataclass(frozen=True)
class AlertRaised(Effect):
    alert: AlertEvent | None = None
    type: ClassVar[str] = "AlertRaised"

    def payload(self) -> dict:
        if self.alert is None:
            return {}
        return {"body": f"{self.alert.kind} bpm={self.alert.bpm} spo2={self.alert.spo2_pct}", "url": self.alert.url}


@dataclass(frozen=True)
class Diagnostic(Effect):
    """Ignored or malformed input, kept in the log instead of raising"""
    message: str = ""
    type: ClassVar[str] = "Diagnostic"

    def payload(self) -> dict:
        return {"body": self.message}
