"""The communication link executing firmware effects over AT commands."""

import pytest

from device import GeoFix, HttpUpdate, SendSms
from device.link import CommLink, parse_cgnsinf
from modem import GnssTrack, Sim808, SmsMessage, VirtualNetwork
from telemetry import TelemetryService

OWN = "+593990000001"
KEY = "PULSESIM00000001"


def _link(**network_kwargs):
    service = TelemetryService()
    channel = service.create_channel(KEY)
    network_kwargs.setdefault("http_loss_prob", 0)
    network = VirtualNetwork(telemetry=service, **network_kwargs)
    modem = Sim808(network, OWN)
    network.attach(modem)
    link = CommLink(modem)
    return link, service, channel


def _update(t_ms, bpm=75, spo2=97):
    return HttpUpdate(t_ms=t_ms, query=(("api_key", KEY), ("field1", str(bpm)), ("field2", str(spo2))))


def test_boot_brings_everything_up():
    link, _service, _channel = _link()
    assert link.boot(0)
    session = link.modem.session
    assert session.text_mode and session.gnss_on and session.bearer_open


def test_gnss_poll():
    link, _service, _channel = _link(gnss_track=GnssTrack.static(-2.2269, -80.859))
    assert not link.poll_gnss(0).valid
    link.boot(0)
    fix = link.poll_gnss(30_000)
    assert fix == GeoFix(lat=-2.2269, lon=-80.859, valid=True, t_ms=30_000)


@pytest.mark.parametrize("line,valid", [
    ("+CGNSINF: 1,1,20200101000000.000,-2.226900,-80.859000", True),
    ("+CGNSINF: 1,0,20200101000000.000,,", False),
    ("+CGNSINF: 0,0,,,", False),
    ("+CGNSINF: 1,1,20200101000000.000,north,west", False),
])
def test_parse_cgnsinf(line, valid):
    assert parse_cgnsinf(line, 0).valid is valid


def test_collect_inbound_reads_every_announced_message():
    link, _service, _channel = _link()
    link.boot(0)
    network = link.modem.network
    network.deliver_inbound(SmsMessage("+593991234567", OWN, "CFG CONTACT ADD +593991234567", 1000))
    network.deliver_inbound(SmsMessage("+593991111111", OWN, "CFG APIKEY ABCDEFGH12345678", 1000))
    messages = link.collect_inbound(1100)
    assert [(m.sender, m.body) for m in messages] == [
        ("+593991234567", "CFG CONTACT ADD +593991234567"),
        ("+593991111111", "CFG APIKEY ABCDEFGH12345678"),
    ]
    assert all(m.to == OWN for m in messages)
    assert link.collect_inbound(1200) == []


def test_dispatch_sends_sms_and_uploads():
    link, service, channel = _link()
    link.boot(0)
    effects = [
        SendSms(t_ms=48_000, to="+593991111111", body="ALERT Bradycardia: BPM=45 SpO2=97% Location: unavailable"),
        _update(48_000),
    ]
    result = link.dispatch(effects, 48_000)
    assert result.sms_sent == [effects[0]]
    assert result.sms_failed == []
    assert len(result.uploads) == 1 and result.uploads[0].status == 200
    assert link.modem.network.inboxes["+593991111111"][0].body.startswith("ALERT Bradycardia")
    assert [e.field1 for e in service.snapshot(channel.id)] == [75.0]
    assert link.modem.session.http.value == "Idle"


def test_lost_sms_and_upload_are_reported():
    link, service, channel = _link(sms_loss_prob=1, http_loss_prob=1)
    link.boot(0)
    result = link.dispatch([SendSms(t_ms=0, to="+593991111111", body="x"), _update(0)], 0)
    assert len(result.sms_failed) == 1
    assert len(result.uploads) == 1 and not result.uploads[0].delivered
    assert service.snapshot(channel.id) == []


def test_upload_without_bearer_is_an_error():
    link, _service, _channel = _link()
    result = link.dispatch([_update(0)], 0)
    assert result.uploads == []
    assert result.upload_errors == 1


def test_upload_recovers_from_a_stale_http_session():
    link, service, channel = _link()
    link.boot(0)
    link.modem.command("AT+HTTPINIT", 0)
    attempt = link.upload(_update(48_000), 48_000)
    assert attempt is not None and attempt.delivered
    assert len(service.snapshot(channel.id)) == 1
