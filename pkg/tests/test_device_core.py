"""Firmware state machine: classification, alert latching, configuration window and the upload schedule."""

import re

import pytest

from device import (
    MAPS_URL_PATTERN,
    AlertRaised,
    BpmClass,
    BpmRange,
    ConfigChanged,
    ConfigError,
    DeviceConfig,
    DeviceState,
    Diagnostic,
    DisplayEvent,
    GeoFix,
    HttpUpdate,
    Mode,
    SendSms,
    TickInputs,
    build_alert_sms,
    build_update_request,
    classify_bpm,
    handle_config_sms,
    maps_url,
    tick,
)
from device.core import ACK_BAD, ACK_DUPLICATE, ACK_FULL, ACK_REJECTED, ACK_UNKNOWN, _check_alert
from modem import SmsMessage
from vitals import Quality, VitalsReading

OWN = "+593990000001"
API_KEY = "PULSESIM00000001"
CONTACTS = ("+593991111111", "+593992222222")
ALERT_PATTERN = re.compile(r"^ALERT (Bradycardia|Tachycardia): BPM=\d+ SpO2=\d+% Location: (https://maps\.google\.com/\?q=-?\d+\.\d{6},-?\d+\.\d{6}|unavailable)$")


def _config(**kwargs) -> DeviceConfig:
    return DeviceConfig(own_number=OWN, api_key=API_KEY, **kwargs)


def _state(**kwargs) -> DeviceState:
    return DeviceState(config=_config(**kwargs))


def _feed(state: DeviceState, now_ms: int, bpm: int, spo2: int = 97, inputs: TickInputs | None = None):
    """Tick with a ready-made reading in place of sensing"""
    state.last_reading = VitalsReading.good(now_ms, bpm, spo2)
    state.last_reading_ms = now_ms
    effects = _check_alert(state, state.last_reading, now_ms)
    state, more = tick(state, now_ms, inputs)
    return state, effects + more


def _sms(body: str, t_ms: int, sender: str = "+593991234567") -> SmsMessage:
    return SmsMessage(sender=sender, to=OWN, body=body, t_ms=t_ms)


@pytest.mark.parametrize("bpm", range(0, 251))
def test_classification_sweep(bpm):
    kind = classify_bpm(bpm, BpmRange(60, 100))
    if bpm < 60:
        assert kind is BpmClass.BRADYCARDIA
    elif bpm > 100:
        assert kind is BpmClass.TACHYCARDIA
    else:
        assert kind is BpmClass.NORMAL


def test_negative_bpm_is_an_error():
    with pytest.raises(ValueError):
        classify_bpm(-1, BpmRange())


@pytest.mark.parametrize("low,high", [(60, 60), (100, 60)])
def test_bpm_range_needs_low_below_high(low, high):
    with pytest.raises(ConfigError):
        BpmRange(low, high)


@pytest.mark.parametrize("kwargs", [
    {"own_number": "0999"},
    {"api_key": "short"},
    {"contacts": ("+593991111111",) * 2},
    {"contacts": ("+593991111111", "+593991111112", "+593991111113", "+593991111114")},
    {"contacts": ("593991111111",)},
    {"upload_interval_s": 0},
    {"vitals_window_s": 4},
])
def test_config_validation(kwargs):
    base = {"own_number": OWN, "api_key": API_KEY}
    with pytest.raises(ConfigError):
        DeviceConfig(**{**base, **kwargs})


def test_maps_url_has_six_decimals():
    fix = GeoFix(lat=-2.2269, lon=-80.859, valid=True, t_ms=0)
    assert maps_url(fix) == "https://maps.google.com/?q=-2.226900,-80.859000"
    assert MAPS_URL_PATTERN.match(maps_url(fix))
    with pytest.raises(ValueError):
        maps_url(GeoFix.invalid(0))


@pytest.mark.parametrize("bpm,kind", [(42, BpmClass.BRADYCARDIA), (181, BpmClass.TACHYCARDIA)])
@pytest.mark.parametrize("fix", [
    GeoFix(lat=-89.123456, lon=-179.654321, valid=True, t_ms=0),
    GeoFix.invalid(0),
])
def test_alert_sms_format(bpm, kind, fix):
    body = build_alert_sms(VitalsReading.good(0, bpm, 88), fix, kind)
    assert ALERT_PATTERN.match(body)
    assert len(body) <= 160
    assert body.startswith(f"ALERT {kind}: BPM={bpm} SpO2=88% Location: ")
    assert body.endswith("unavailable") != fix.valid


def test_alert_needs_good_reading():
    with pytest.raises(ValueError):
        build_alert_sms(VitalsReading.rejected(0, Quality.UNSTABLE), GeoFix.invalid(0), BpmClass.BRADYCARDIA)


def test_update_request_query_order():
    request = build_update_request(VitalsReading.good(4000, 75, 97), API_KEY, t_ms=48_000)
    assert request.t_ms == 48_000
    assert request.request_target == f"/update?api_key={API_KEY}&field1=75&field2=97"
    assert request.url == f"http://api.thingspeak.com/update?api_key={API_KEY}&field1=75&field2=97"
    with pytest.raises(ValueError):
        build_update_request(VitalsReading.rejected(0, Quality.NO_CONTACT), API_KEY)


def test_seventy_five_uploads_per_hour():
    state = _state()
    state.last_reading = VitalsReading.good(0, 72, 98)
    uploads = []
    for now in range(0, 3_600_001, 100):
        state, effects = tick(state, now)
        uploads.extend(e for e in effects if isinstance(e, HttpUpdate))
    assert len(uploads) == 75
    assert [u.t_ms for u in uploads] == list(range(48_000, 3_600_001, 48_000))


def test_no_upload_without_a_good_reading():
    state = _state()
    state.last_reading = VitalsReading.rejected(0, Quality.NO_CONTACT)
    for now in range(0, 200_001, 1000):
        state, effects = tick(state, now)
        assert not any(isinstance(e, HttpUpdate) for e in effects)


def test_alert_latches_until_back_in_range():
    state = _state(contacts=CONTACTS)
    state.last_fix = GeoFix(lat=-2.2269, lon=-80.859, valid=True, t_ms=0)
    sent = []
    for i, bpm in enumerate([75, 45, 44, 47, 75, 46, 120, 121, 80]):
        state, effects = _feed(state, i * 4000, bpm)
        sent.extend(e for e in effects if isinstance(e, SendSms))
    kinds = [s.body.split(":")[0] for s in sent]
    assert kinds == ["ALERT Bradycardia"] * 2 + ["ALERT Bradycardia"] * 2 + ["ALERT Tachycardia"] * 2
    assert [s.to for s in sent] == list(CONTACTS) * 3
    assert all(ALERT_PATTERN.match(s.body) for s in sent)
    assert "https://maps.google.com/?q=-2.226900,-80.859000" in sent[0].body
    assert state.alert_latch == "Armed"


def test_class_change_while_latched_raises_a_new_alert():
    state = _state(contacts=CONTACTS[:1])
    state, first = _feed(state, 0, 45)
    state, second = _feed(state, 4000, 130)
    assert any(isinstance(e, AlertRaised) for e in first)
    assert any(isinstance(e, AlertRaised) for e in second)
    assert state.alert_latch == "Latched(Tachycardia)"


def test_alert_without_contacts_is_diagnosed():
    state = _state()
    state, effects = _feed(state, 0, 30)
    assert [type(e) for e in effects] == [AlertRaised, Diagnostic]
    assert effects[0].alert.url is None


def test_button_opens_the_configuration_window():
    state = _state()
    state.last_reading = VitalsReading.good(0, 70, 98)
    state, effects = tick(state, 20_000, TickInputs(button_presses=1))
    assert state.mode is Mode.CONFIGURING
    assert effects == [DisplayEvent(t_ms=20_000, lines=("CONFIG MODE", "BPM=70 SpO2=98%"))]

    state, _ = tick(state, 100_000)
    assert state.mode is Mode.CONFIGURING
    state, effects = tick(state, 100_001)
    assert state.mode is Mode.MONITORING
    assert effects[0] == DisplayEvent(t_ms=100_001, lines=("MONITORING",))


def test_second_press_does_not_extend_the_window():
    state = _state()
    state, _ = tick(state, 10_000, TickInputs(button_presses=1))
    state, effects = tick(state, 50_000, TickInputs(button_presses=1))
    assert state.configuring_since_ms == 10_000
    assert isinstance(effects[0], DisplayEvent)


def test_config_sms_accepted_inside_the_window():
    state = _state(contacts=CONTACTS[:1])
    state, _ = tick(state, 20_000, TickInputs(button_presses=1))
    state, effects = tick(state, 70_000, TickInputs(inbound_sms=[_sms("CFG CONTACT ADD +593991234567", 70_000)]))
    assert state.config.contacts == (CONTACTS[0], "+593991234567")
    assert effects == [
        ConfigChanged(t_ms=70_000, command="CFG CONTACT ADD +593991234567"),
        SendSms(t_ms=70_000, to="+593991234567", body="OK CONTACT ADD", reason="ack"),
    ]


def test_config_sms_rejected_outside_the_window():
    state = _state(contacts=CONTACTS)
    before = state.config
    state, effects = tick(state, 70_000, TickInputs(inbound_sms=[_sms(f"CFG CONTACT DEL {CONTACTS[0]}", 70_000)]))
    assert state.config == before
    assert [type(e) for e in effects] == [Diagnostic, SendSms]
    assert effects[1].body == ACK_REJECTED


@pytest.mark.parametrize("contacts,body,expected_ack,expected_contacts", [
    ((), "CFG CONTACT ADD +593991234567", "OK CONTACT ADD", ("+593991234567",)),
    ((), "cfg contact add +593991234567", "OK CONTACT ADD", ("+593991234567",)),
    (CONTACTS, f"CFG CONTACT DEL {CONTACTS[0]}", "OK CONTACT DEL", CONTACTS[1:]),
    (CONTACTS, f"CFG CONTACT ADD {CONTACTS[0]}", ACK_DUPLICATE, CONTACTS),
    (CONTACTS + ("+593993333333",), "CFG CONTACT ADD +593991234567", ACK_FULL, CONTACTS + ("+593993333333",)),
    (CONTACTS, "CFG CONTACT DEL +593999999999", ACK_UNKNOWN, CONTACTS),
    ((), "CFG CONTACT ADD 0991234567", ACK_BAD, ()),
    ((), "CFG APIKEY tooshort", ACK_BAD, ()),
    ((), "CFG REBOOT", ACK_BAD, ()),
    ((), "hello", ACK_BAD, ()),
])
def test_config_grammar(contacts, body, expected_ack, expected_contacts):
    state = _state(contacts=contacts)
    state, _ = tick(state, 0, TickInputs(button_presses=1))
    config, ack = handle_config_sms(_sms(body, 1000), state, 1000, state.config)
    assert ack == expected_ack
    assert config.contacts == expected_contacts


def test_apikey_command_replaces_the_key():
    state = _state()
    state, _ = tick(state, 0, TickInputs(button_presses=1))
    config, ack = handle_config_sms(_sms("CFG APIKEY ABCDEFGH12345678", 1000), state, 1000, state.config)
    assert ack == "OK APIKEY"
    assert config.api_key == "ABCDEFGH12345678"


def test_sms_for_another_number_is_ignored():
    state = _state()
    msg = SmsMessage(sender="+593991234567", to="+593990000099", body="CFG CONTACT ADD +593991234567", t_ms=0)
    state, effects = tick(state, 0, TickInputs(inbound_sms=[msg]))
    assert [type(e) for e in effects] == [Diagnostic]


def test_backwards_tick_is_diagnosed_and_ignored():
    state = _state()
    state, _ = tick(state, 10_000)
    state, effects = tick(state, 9_000, TickInputs(button_presses=1))
    assert [type(e) for e in effects] == [Diagnostic]
    assert state.mode is Mode.MONITORING
    assert state.last_tick_ms == 10_000


def test_fix_is_remembered():
    state = _state()
    fix = GeoFix(lat=1.0, lon=2.0, valid=True, t_ms=500)
    state, _ = tick(state, 500, TickInputs(fix=fix))
    assert state.last_fix == fix
