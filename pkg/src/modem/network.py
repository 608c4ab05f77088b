"""Virtual GSM network: SMS routing between the device and phones, GNSS, and the GPRS bridge to telemetry.

Loss is rolled per attempt from seeded generators, one per message class, so
the SMS and HTTP outcomes of a run do not depend on each other.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction
from typing import TYPE_CHECKING, Protocol

import numpy as np
from rsxml import Logger

from device.geo import GeoFix
from telemetry import TelemetryService
from telemetry.urls import parse_request_target

from .gnss import GnssTrack
from .sms import SmsMessage

if TYPE_CHECKING:
    from device.effects import HttpUpdate

GSM_BANDS = (850, 900, 1800, 1900)
DEFAULT_HTTP_LOSS = Fraction(2, 75)
STATUS_NETWORK_ERROR = 0


class LossModel(StrEnum):
    BERNOULLI = "bernoulli"
    STRATIFIED = "stratified"


class InboundSink(Protocol):
    """What the network needs from a device modem to deliver unsolicited lines"""
    own_number: str

    def notify(self, lines: list[str]) -> None: ...


def as_probability(value: float | str | Fraction) -> Fraction:
    """Probability from a float, a Fraction or an "a/b" string"""
    prob = Fraction(value).limit_denominator(1_000_000) if not isinstance(value, Fraction) else value
    if not 0 <= prob <= 1:
        raise ValueError(f"probability must lie in [0, 1], got {value}")
    return prob


class LossRoller:
    """Seeded delivery decisions for one message class.

    bernoulli: independent roll per attempt.
    stratified: for probability a/b, exactly a losses at seeded positions in every block of b attempts.
    """

    def __init__(self, probability: Fraction, model: LossModel, rng: np.random.Generator):
        self.probability = probability
        self.model = LossModel(model)
        self._rng = rng
        self._block: set[int] = set()
        self._position = 0

    def delivered(self) -> bool:
        if self.probability == 0:
            return True
        if self.model is LossModel.BERNOULLI:
            return bool(self._rng.random() >= float(self.probability))
        size = self.probability.denominator
        if self._position % size == 0:
            picks = self._rng.choice(size, size=self.probability.numerator, replace=False)
            self._block = {int(i) for i in picks}
        lost = (self._position % size) in self._block
        self._position += 1
        return not lost


@dataclass
class StoredSms:
    index: int
    message: SmsMessage
    read: bool = False


@dataclass(frozen=True)
class HttpAttempt:
    t_ms: int
    url: str
    status: int
    body: str
    delivered: bool

    def to_record(self) -> dict:
        return {"kind": "http", "t_ms": self.t_ms, "url": self.url, "status": self.status,
                "body": self.body, "delivered": self.delivered}


@dataclass(frozen=True)
class DroppedRecord:
    kind: str
    t_ms: int
    detail: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return {"kind": self.kind, "t_ms": self.t_ms, **self.detail}


class VirtualNetwork:
    """Single-writer network state owned by the simulation loop"""

    def __init__(
        self,
        seed: int | np.random.SeedSequence = 0,
        sms_loss_prob: float | str | Fraction = 0,
        http_loss_prob: float | str | Fraction = DEFAULT_HTTP_LOSS,
        loss_model: LossModel | str = LossModel.BERNOULLI,
        gnss_track: GnssTrack | None = None,
        band: int = 900,
        telemetry: TelemetryService | None = None,
    ):
        if band not in GSM_BANDS:
            raise ValueError(f"band must be one of {GSM_BANDS}, got {band}")
        sequence = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        sms_seq, http_seq = sequence.spawn(2)
        self.band = band
        self.loss_model = LossModel(loss_model)
        self.sms_loss = LossRoller(as_probability(sms_loss_prob), self.loss_model, np.random.default_rng(sms_seq))
        self.http_loss = LossRoller(as_probability(http_loss_prob), self.loss_model, np.random.default_rng(http_seq))
        self.gnss_track = gnss_track or GnssTrack.none()
        self.telemetry = telemetry

        self.inboxes: dict[str, list[SmsMessage]] = {}
        self.storage: dict[str, list[StoredSms]] = {}
        self.devices: dict[str, InboundSink] = {}
        self.sms_log: list[tuple[SmsMessage, bool]] = []
        self.http_attempts: list[HttpAttempt] = []
        self.dropped: list[DroppedRecord] = []
        self._log = Logger('VirtualNetwork')

    def attach(self, device: InboundSink) -> None:
        """Register a device modem so SMS to its number land in SIM storage"""
        self.devices[device.own_number] = device
        self.storage.setdefault(device.own_number, [])

    # SMS ------------------------------------------------------------------

    def submit_sms(self, msg: SmsMessage) -> bool:
        """Route an outgoing message. Returns False when the loss roll drops it"""
        delivered = self.sms_loss.delivered()
        self.sms_log.append((msg, delivered))
        if not delivered:
            self.dropped.append(DroppedRecord("sms", msg.t_ms, {"from": msg.sender, "to": msg.to, "body": msg.body}))
            self._log.debug(f"t={msg.t_ms} SMS to {msg.to} lost")
            return False
        if msg.to in self.devices:
            self.deliver_inbound(msg)
        else:
            self.inboxes.setdefault(msg.to, []).append(msg)
        return True

    def deliver_inbound(self, msg: SmsMessage) -> list[str]:
        """Store a message on the recipient device SIM and notify it with +CMTI"""
        device = self.devices.get(msg.to)
        if device is None:
            self._log.warning(f"t={msg.t_ms} inbound SMS for {msg.to} has no attached device, ignored")
            return []
        stored = self.storage[msg.to]
        entry = StoredSms(index=len(stored) + 1, message=msg)
        stored.append(entry)
        lines = [f'+CMTI: "SM",{entry.index}']
        device.notify(lines)
        return lines

    def read_stored(self, number: str, index: int) -> StoredSms | None:
        """Stored message by index; the returned copy shows whether it had been read before"""
        for entry in self.storage.get(number, []):
            if entry.index == index:
                seen = StoredSms(entry.index, entry.message, entry.read)
                entry.read = True
                return seen
        return None

    # GNSS / GPRS ------------------------------------------------------------

    def gnss_fix(self, now_ms: int) -> GeoFix:
        return self.gnss_track(now_ms)

    def http_request(self, url: str, now_ms: int) -> tuple[int, str]:
        """Carry one HTTP GET over GPRS. Lost attempts return status 0"""
        if not self.http_loss.delivered():
            attempt = HttpAttempt(now_ms, url, STATUS_NETWORK_ERROR, "", False)
            self.http_attempts.append(attempt)
            self.dropped.append(DroppedRecord("http", now_ms, {"url": url}))
            self._log.debug(f"t={now_ms} HTTP attempt lost: {url}")
            return STATUS_NETWORK_ERROR, ""
        path, params = parse_request_target(url)
        if self.telemetry is None or path != "/update":
            status, body = 404, ""
        else:
            status, body = 200, str(self.telemetry.handle_update(params, now_ms))
        self.http_attempts.append(HttpAttempt(now_ms, url, status, body, True))
        return status, body

    def counts(self) -> dict[str, dict[str, int]]:
        """submitted / delivered / dropped per message class"""
        sms_delivered = sum(1 for _msg, delivered in self.sms_log if delivered)
        http_delivered = sum(1 for a in self.http_attempts if a.delivered)
        return {
            "sms": {"submitted": len(self.sms_log), "delivered": sms_delivered,
                    "dropped": len(self.sms_log) - sms_delivered},
            "http": {"submitted": len(self.http_attempts), "delivered": http_delivered,
                     "dropped": len(self.http_attempts) - http_delivered},
        }

    def ledger_records(self) -> list[dict]:
        """SMS submissions and HTTP attempts with their outcome, ordered by time"""
        records = [{"kind": "sms", **msg.to_record(), "delivered": delivered} for msg, delivered in self.sms_log]
        records.extend(a.to_record() for a in self.http_attempts)
        return sorted(records, key=lambda r: r["t_ms"])


def http_bridge(request: HttpUpdate, network: VirtualNetwork, now_ms: int | None = None) -> tuple[int, str]:
    """Forward a device HttpUpdate through the network; status 0 on loss"""
    return network.http_request(request.url, request.t_ms if now_ms is None else now_ms)
