"""Firmware state machine: sensing cadence, display, configuration window, alerting and the upload schedule.

`tick` is the only mutator. It is called from one timeline with non-decreasing
times and returns the effects of that step in a fixed order.
"""
from __future__ import annotations

from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import StrEnum

from rsxml import Logger

from modem.sms import SMS_MAX_CHARS, SmsMessage
from vitals import DEFAULT_DETECTION, DetectionParams, PpgSample, VitalsReading, compute_vitals

from .config import MAX_CONTACTS, BpmRange, DeviceConfig, is_api_key, is_e164
from .effects import (
    AlertEvent,
    AlertRaised,
    BpmClass,
    ConfigChanged,
    Diagnostic,
    DisplayEvent,
    Effect,
    HttpUpdate,
    SendSms,
)
from .geo import GeoFix, maps_url

ACK_REJECTED = "REJECTED: config window closed"
ACK_BAD = "ERR: bad command"
ACK_FULL = "ERR: contact list full"
ACK_DUPLICATE = "ERR: duplicate contact"
ACK_UNKNOWN = "ERR: unknown contact"


class Mode(StrEnum):
    MONITORING = "Monitoring"
    CONFIGURING = "Configuring"


@dataclass
class TickInputs:
    samples: Sequence[PpgSample] = ()
    button_presses: int = 0
    inbound_sms: Sequence[SmsMessage] = ()
    fix: GeoFix | None = None


@dataclass
class DeviceState:
    config: DeviceConfig
    mode: Mode = Mode.MONITORING
    configuring_since_ms: int | None = None
    last_upload_ms: int = 0
    last_reading: VitalsReading | None = None
    last_reading_ms: int | None = None
    # None means armed
    latched: BpmClass | None = None
    last_fix: GeoFix | None = None
    last_tick_ms: int | None = None
    sensing_since_ms: int | None = None
    window: deque[PpgSample] = field(default_factory=deque)
    detection: DetectionParams = DEFAULT_DETECTION

    @property
    def alert_latch(self) -> str:
        return "Armed" if self.latched is None else f"Latched({self.latched})"


def classify_bpm(bpm: int, nominal: BpmRange) -> BpmClass:
    if bpm < 0:
        raise ValueError(f"bpm must not be negative, got {bpm}")
    if bpm < nominal.low:
        return BpmClass.BRADYCARDIA
    if bpm > nominal.high:
        return BpmClass.TACHYCARDIA
    return BpmClass.NORMAL


def build_alert_sms(reading: VitalsReading, fix: GeoFix, kind: BpmClass) -> str:
    """`ALERT <kind>: BPM=<bpm> SpO2=<spo2>% Location: <url | unavailable>`"""
    if not reading.is_good:
        raise ValueError("alerts are only built from Good readings")
    location = maps_url(fix) if fix.valid else "unavailable"
    body = f"ALERT {kind}: BPM={reading.bpm} SpO2={reading.spo2_pct}% Location: {location}"
    if len(body) > SMS_MAX_CHARS:
        raise ValueError(f"alert body exceeds one SMS: {len(body)} characters")
    return body


def build_update_request(reading: VitalsReading, api_key: str, t_ms: int | None = None) -> HttpUpdate:
    """HttpUpdate for `/update?api_key=<key>&field1=<bpm>&field2=<spo2>`"""
    if not reading.is_good:
        raise ValueError("only Good readings are uploaded")
    query = (("api_key", api_key), ("field1", str(reading.bpm)), ("field2", str(reading.spo2_pct)))
    return HttpUpdate(t_ms=reading.t_ms if t_ms is None else t_ms, path="/update", query=query)


def window_open(state: DeviceState, now_ms: int) -> bool:
    return (
        state.mode is Mode.CONFIGURING
        and state.configuring_since_ms is not None
        and now_ms - state.configuring_since_ms <= state.config.config_window_ms
    )


def handle_config_sms(msg: SmsMessage, state: DeviceState, now_ms: int,
                      config: DeviceConfig) -> tuple[DeviceConfig, str]:
    """Apply one `CFG ...` command. Returns the (possibly unchanged) config and the ack body.

    Grammar:
        CFG CONTACT ADD <e164>
        CFG CONTACT DEL <e164>
        CFG APIKEY <16 alphanumerics>
    """
    if not window_open(state, now_ms):
        return config, ACK_REJECTED

    tokens = msg.body.split()
    keywords = [t.upper() for t in tokens]
    match keywords:
        case ["CFG", "CONTACT", "ADD", _]:
            number = tokens[3]
            if not is_e164(number):
                return config, ACK_BAD
            if number in config.contacts:
                return config, ACK_DUPLICATE
            if len(config.contacts) >= MAX_CONTACTS:
                return config, ACK_FULL
            return config.with_contact(number), "OK CONTACT ADD"
        case ["CFG", "CONTACT", "DEL", _]:
            number = tokens[3]
            if not is_e164(number):
                return config, ACK_BAD
            if number not in config.contacts:
                return config, ACK_UNKNOWN
            return config.without_contact(number), "OK CONTACT DEL"
        case ["CFG", "APIKEY", _]:
            key = tokens[2]
            if not is_api_key(key):
                return config, ACK_BAD
            return config.with_api_key(key), "OK APIKEY"
        case _:
            return config, ACK_BAD


def _display_lines(state: DeviceState) -> tuple[str, ...]:
    reading = state.last_reading
    if reading is not None and reading.is_good:
        return ("CONFIG MODE", f"BPM={reading.bpm} SpO2={reading.spo2_pct}%")
    return ("CONFIG MODE", "BPM=-- SpO2=--")


def _take_samples(state: DeviceState, samples: Sequence[PpgSample]) -> None:
    if not samples:
        return
    if state.sensing_since_ms is None:
        state.sensing_since_ms = samples[0].t_ms
    state.window.extend(samples)
    horizon = state.window[-1].t_ms - state.config.vitals_window_ms
    while state.window and state.window[0].t_ms < horizon:
        state.window.popleft()


def _reading_due(state: DeviceState, now_ms: int) -> bool:
    if state.sensing_since_ms is None or not state.window:
        return False
    if state.last_reading_ms is None:
        return now_ms - state.sensing_since_ms >= state.config.vitals_window_ms
    return now_ms - state.last_reading_ms >= state.config.reading_interval_ms


def _check_alert(state: DeviceState, reading: VitalsReading, now_ms: int) -> list[Effect]:
    log = Logger('DeviceCore')
    if not reading.is_good:
        return []
    kind = classify_bpm(reading.bpm, state.config.nominal_bpm)
    if kind is BpmClass.NORMAL:
        if state.latched is not None:
            log.debug(f"t={now_ms} bpm {reading.bpm} back in range, alert re-armed")
        state.latched = None
        return []
    if state.latched is kind:
        return []

    state.latched = kind
    fix = state.last_fix if state.last_fix is not None else GeoFix.invalid(now_ms)
    url = maps_url(fix) if fix.valid else None
    alert = AlertEvent(t_ms=now_ms, kind=kind, bpm=reading.bpm, spo2_pct=reading.spo2_pct, fix=fix, url=url)
    body = build_alert_sms(reading, fix, kind)
    log.info(f"t={now_ms} {kind} alert at {reading.bpm} bpm to {len(state.config.contacts)} contact(s)")

    effects: list[Effect] = [AlertRaised(t_ms=now_ms, alert=alert)]
    if not state.config.contacts:
        effects.append(Diagnostic(t_ms=now_ms, message="alert raised with no contacts configured"))
    effects.extend(SendSms(t_ms=now_ms, to=number, body=body, reason="alert") for number in state.config.contacts)
    return effects


def tick(state: DeviceState, now_ms: int, inputs: TickInputs | None = None) -> tuple[DeviceState, list[Effect]]:
    """Advance the firmware to now_ms.

    Order within a step: configuration window expiry, button presses, GNSS fix,
    inbound SMS, sample intake, reading and alert check, upload schedule.

    Args:
        state (DeviceState): mutated in place and returned
        now_ms (int): simulation time, never earlier than the previous tick
        inputs (TickInputs): what arrived since the previous tick

    Returns:
        tuple[DeviceState, list[Effect]]: the state and the effects of this step
    """
    inputs = inputs or TickInputs()
    effects: list[Effect] = []
    if state.last_tick_ms is not None and now_ms < state.last_tick_ms:
        return state, [Diagnostic(t_ms=now_ms, message=f"tick at {now_ms} ms is earlier than {state.last_tick_ms} ms, ignored")]
    state.last_tick_ms = now_ms
    config = state.config

    if state.mode is Mode.CONFIGURING and not window_open(state, now_ms):
        state.mode = Mode.MONITORING
        state.configuring_since_ms = None
        effects.append(DisplayEvent(t_ms=now_ms, lines=("MONITORING",)))

    for _ in range(max(0, inputs.button_presses)):
        if state.mode is Mode.MONITORING:
            state.mode = Mode.CONFIGURING
            state.configuring_since_ms = now_ms
        effects.append(DisplayEvent(t_ms=now_ms, lines=_display_lines(state)))

    if inputs.fix is not None:
        state.last_fix = inputs.fix

    for msg in inputs.inbound_sms:
        if msg.to != config.own_number:
            effects.append(Diagnostic(t_ms=now_ms, message=f"SMS for {msg.to} ignored"))
            continue
        new_config, ack = handle_config_sms(msg, state, now_ms, state.config)
        if new_config != state.config:
            state.config = new_config
            effects.append(ConfigChanged(t_ms=now_ms, command=msg.body.strip()))
        if ack == ACK_REJECTED:
            effects.append(Diagnostic(t_ms=now_ms, message=f"configuration SMS from {msg.sender} outside the window"))
        effects.append(SendSms(t_ms=now_ms, to=msg.sender, body=ack, reason="ack"))

    _take_samples(state, inputs.samples)
    if _reading_due(state, now_ms):
        reading = compute_vitals(list(state.window), state.config.vitals_window_ms, t_ms=now_ms, params=state.detection)
        state.last_reading = reading
        state.last_reading_ms = now_ms
        effects.extend(_check_alert(state, reading, now_ms))

    reading = state.last_reading
    if now_ms - state.last_upload_ms >= state.config.upload_interval_ms and reading is not None and reading.is_good:
        effects.append(build_update_request(reading, state.config.api_key, t_ms=now_ms))
        state.last_upload_ms = now_ms

    return state, effects
