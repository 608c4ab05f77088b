"""SIM808 session behaviour driven through the serial front end."""

import re

import numpy as np
import pytest

from modem import GnssTrack, HttpState, Sim808, SmsMessage, VirtualNetwork, is_terminal
from telemetry import TelemetryService

OWN = "+593990000001"
PHONE = "+593991111111"
API_KEY = "PULSESIM00000001"
UPDATE_URL = f"http://api.thingspeak.com/update?api_key={API_KEY}&field1=75&field2=97"


def _modem(**network_kwargs) -> Sim808:
    network_kwargs.setdefault("http_loss_prob", 0)
    network = VirtualNetwork(**network_kwargs)
    modem = Sim808(network, OWN)
    network.attach(modem)
    return modem


def _bearer_up(modem: Sim808, now_ms: int = 0) -> None:
    assert modem.command('AT+SAPBR=3,1,"CONTYPE","GPRS"', now_ms) == ["OK"]
    assert modem.command("AT+SAPBR=1,1", now_ms) == ["OK"]


def test_basic_commands():
    modem = _modem()
    assert modem.command("AT", 0) == ["OK"]
    assert modem.command("AT+CMGF=1", 0) == ["OK"]
    assert modem.command("AT+CREG?", 0) == ["+CREG: 0,1", "OK"]
    assert modem.command("AT+NOPE", 0) == ["ERROR"]


def test_bearer_query_and_double_open():
    modem = _modem()
    assert modem.command("AT+SAPBR=2,1", 0) == ['+SAPBR: 1,3,"0.0.0.0"', "OK"]
    _bearer_up(modem)
    assert modem.command("AT+SAPBR=2,1", 0) == ['+SAPBR: 1,1,"10.64.0.1"', "OK"]
    assert modem.command("AT+SAPBR=1,1", 0) == ["ERROR"]
    assert modem.command("AT+SAPBR=0,1", 0) == ["OK"]
    assert modem.command("AT+SAPBR=0,1", 0) == ["ERROR"]


def test_cmgs_needs_text_mode():
    modem = _modem()
    assert modem.command(f'AT+CMGS="{PHONE}"', 0) == ["ERROR"]


def test_cmgs_prompt_and_references():
    modem = _modem()
    modem.command("AT+CMGF=1", 0)
    for ref in (1, 2, 3):
        assert modem.command(f'AT+CMGS="{PHONE}"', 1000) == ["> "]
        assert modem.write(f"hello {ref}".encode() + b"\x1a", 1000) == [f"+CMGS: {ref}", "OK"]
    inbox = modem.network.inboxes[PHONE]
    assert [m.body for m in inbox] == ["hello 1", "hello 2", "hello 3"]
    assert all(m.sender == OWN and m.t_ms == 1000 for m in inbox)


def test_cmgs_payload_may_arrive_in_pieces():
    modem = _modem()
    modem.command("AT+CMGF=1", 0)
    assert modem.command(f'AT+CMGS="{PHONE}"', 0) == ["> "]
    assert modem.write(b"split ", 0) == []
    assert modem.write(b"body\x1a", 0) == ["+CMGS: 1", "OK"]
    assert modem.network.inboxes[PHONE][0].body == "split body"


def test_escape_cancels_the_prompt():
    modem = _modem()
    modem.command("AT+CMGF=1", 0)
    modem.command(f'AT+CMGS="{PHONE}"', 0)
    assert modem.write(b"never sent\x1b", 0) == ["OK"]
    assert PHONE not in modem.network.inboxes
    assert modem.command("AT", 0) == ["OK"]


def test_body_over_160_characters_is_refused():
    modem = _modem()
    modem.command("AT+CMGF=1", 0)
    modem.command(f'AT+CMGS="{PHONE}"', 0)
    assert modem.write(b"x" * 161 + b"\x1a", 0) == ["+CMS ERROR: 305"]
    assert modem.network.sms_log == []
    modem.command(f'AT+CMGS="{PHONE}"', 0)
    assert modem.write(b"x" * 160 + b"\x1a", 0) == ["+CMGS: 1", "OK"]


def test_unterminated_prompt_payload_is_capped():
    modem = _modem()
    modem.command("AT+CMGF=1", 0)
    modem.command(f'AT+CMGS="{PHONE}"', 0)
    assert modem.write(b"y" * 200, 0) == ["+CMS ERROR: 305"]
    assert not modem.session.in_prompt
    # the tail of the oversized payload is swallowed with its terminator
    assert modem.write(b"y" * 50 + b"\x1a", 0) == []
    assert modem.command("AT", 0) == ["OK"]
    assert modem.network.sms_log == []


def test_sms_loss_rate_and_reference_continuity():
    modem = Sim808(VirtualNetwork(seed=5, sms_loss_prob=0.1), OWN, record_transcript=False)
    modem.command("AT+CMGF=1", 0)
    refs = []
    failures = 0
    for i in range(10_000):
        assert modem.command(f'AT+CMGS="{PHONE}"', i) == ["> "]
        lines = modem.write(b"ping\x1a", i)
        if lines == ["+CMS ERROR: 500"]:
            failures += 1
        else:
            m = re.match(r"^\+CMGS: (\d+)$", lines[0])
            assert m and lines[1] == "OK"
            refs.append(int(m.group(1)))
    counts = modem.network.counts()["sms"]
    assert counts["submitted"] == 10_000
    assert counts["dropped"] == failures
    assert counts["delivered"] == len(refs) == len(modem.network.inboxes[PHONE])
    assert refs == list(range(1, len(refs) + 1))
    assert 0.08 <= failures / 10_000 <= 0.12


def test_inbound_sms_is_announced_then_read_once():
    modem = _modem()
    modem.command("AT+CMGF=1", 0)
    lines = modem.network.deliver_inbound(SmsMessage(sender=PHONE, to=OWN, body="CFG APIKEY ABCDEFGH12345678", t_ms=5000))
    assert lines == ['+CMTI: "SM",1']
    assert modem.read_unsolicited() == ['+CMTI: "SM",1']
    assert modem.read_unsolicited() == []

    first = modem.command("AT+CMGR=1", 6000)
    assert first == [f'+CMGR: "REC UNREAD","{PHONE}","","20/01/01,00:00:05+00"', "CFG APIKEY ABCDEFGH12345678", "OK"]
    second = modem.command("AT+CMGR=1", 7000)
    assert second[0].startswith('+CMGR: "REC READ"')
    assert modem.command("AT+CMGR=2", 7000) == ["+CMS ERROR: 321"]


def test_sms_between_attached_numbers_lands_in_storage():
    modem = _modem()
    modem.command("AT+CMGF=1", 0)
    modem.command(f'AT+CMGS="{OWN}"', 0)
    assert modem.write(b"loopback\x1a", 0) == ["+CMGS: 1", "OK"]
    assert modem.read_unsolicited() == ['+CMTI: "SM",1']


def test_gnss_off_static_and_before_acquisition():
    track = GnssTrack.static(-2.2269, -80.859, acquire_ms=20_000)
    modem = _modem(gnss_track=track)
    assert modem.command("AT+CGNSINF", 0) == ["+CGNSINF: 0,0,,,", "OK"]
    modem.command("AT+CGNSPWR=1", 0)
    assert modem.command("AT+CGNSINF", 10_000) == ["+CGNSINF: 1,0,20200101000010.000,,", "OK"]
    assert modem.command("AT+CGNSINF", 30_000) == ["+CGNSINF: 1,1,20200101000030.000,-2.226900,-80.859000", "OK"]


def test_http_action_needs_init_and_url():
    modem = _modem()
    _bearer_up(modem)
    assert modem.command("AT+HTTPACTION=0", 0) == ["ERROR"]
    assert modem.command("AT+HTTPINIT", 0) == ["OK"]
    assert modem.command("AT+HTTPACTION=0", 0) == ["ERROR"]
    assert modem.command('AT+HTTPPARA="CID",1', 0) == ["OK"]
    assert modem.command("AT+HTTPACTION=0", 0) == ["ERROR"]
    assert modem.network.http_attempts == []


def test_http_update_reaches_telemetry():
    service = TelemetryService()
    channel = service.create_channel(API_KEY, name="wearable")
    modem = _modem(telemetry=service)
    _bearer_up(modem)
    assert modem.command("AT+HTTPINIT", 48_000) == ["OK"]
    assert modem.command(f'AT+HTTPPARA="URL","{UPDATE_URL}"', 48_000) == ["OK"]
    assert modem.command("AT+HTTPACTION=0", 48_000) == ["OK", "+HTTPACTION: 0,200,1"]
    assert modem.command("AT+HTTPREAD", 48_000) == ["+HTTPREAD: 1", "1", "OK"]
    assert modem.command("AT+HTTPTERM", 48_000) == ["OK"]
    assert modem.session.http is HttpState.IDLE

    entries = service.snapshot(channel.id)
    assert [(e.created_at_ms, e.field1, e.field2) for e in entries] == [(48_000, 75.0, 97.0)]
    assert len(modem.attempts) == 1 and modem.attempts[0].delivered


def test_http_action_with_closed_bearer_is_an_error():
    modem = _modem(telemetry=TelemetryService())
    modem.command("AT+HTTPINIT", 0)
    modem.command(f'AT+HTTPPARA="URL","{UPDATE_URL}"', 0)
    assert modem.command("AT+HTTPACTION=0", 0) == ["ERROR"]
    assert modem.network.http_attempts == []


def test_lost_upload_reports_601():
    modem = _modem(http_loss_prob=1, telemetry=TelemetryService())
    _bearer_up(modem)
    modem.command("AT+HTTPINIT", 0)
    modem.command(f'AT+HTTPPARA="URL","{UPDATE_URL}"', 0)
    assert modem.command("AT+HTTPACTION=0", 0) == ["OK", "+HTTPACTION: 0,601,0"]
    assert modem.command("AT+HTTPREAD", 0) == ["ERROR"]
    attempt = modem.network.http_attempts[0]
    assert attempt.status == 0 and not attempt.delivered


def test_random_command_sequences_only_transmit_after_init_and_url():
    rng = np.random.default_rng(99)
    pool = [
        "AT+HTTPINIT",
        "AT+HTTPTERM",
        'AT+HTTPPARA="CID",1',
        f'AT+HTTPPARA="URL","{UPDATE_URL}"',
        "AT+HTTPACTION=0",
        "AT+HTTPREAD",
        "AT",
    ]
    modem = _modem(telemetry=TelemetryService(rate_limit_ms=0))
    _bearer_up(modem)
    initialized = url_set = False
    for step in range(5000):
        command = pool[int(rng.integers(0, len(pool)))]
        before = len(modem.network.http_attempts)
        lines = modem.command(command, step)
        assert sum(1 for x in lines if is_terminal(x)) == 1
        transmitted = len(modem.network.http_attempts) - before
        match command:
            case "AT+HTTPINIT":
                initialized = initialized or lines == ["OK"]
            case "AT+HTTPTERM":
                initialized = url_set = False
            case "AT+HTTPACTION=0":
                assert transmitted == (1 if initialized and url_set else 0)
            case _ if command.startswith('AT+HTTPPARA="URL"'):
                url_set = url_set or (initialized and lines == ["OK"])
        if command != "AT+HTTPACTION=0":
            assert transmitted == 0


def _scripted_transcript() -> str:
    modem = _modem(seed=3, http_loss_prob="1/2", sms_loss_prob="1/4", telemetry=TelemetryService(rate_limit_ms=0))
    modem.command("AT+CMGF=1", 0)
    _bearer_up(modem)
    for t in range(0, 20_000, 1000):
        modem.command(f'AT+CMGS="{PHONE}"', t)
        modem.write(b"status\x1a", t)
        modem.command("AT+HTTPINIT", t)
        modem.command(f'AT+HTTPPARA="URL","{UPDATE_URL}"', t)
        modem.command("AT+HTTPACTION=0", t)
        modem.command("AT+HTTPTERM", t)
    return "".join(modem.transcript)


def test_transcript_is_deterministic_and_prefixed():
    first = _scripted_transcript()
    assert first == _scripted_transcript()
    assert first.startswith(">> AT+CMGF=1\r\n<< OK\r\n")
    for line in first.splitlines():
        assert line.startswith((">> ", "<< "))


@pytest.mark.parametrize("band", [850, 900, 1800, 1900])
def test_supported_bands(band):
    assert VirtualNetwork(band=band).band == band


def test_unsupported_band():
    with pytest.raises(ValueError):
        VirtualNetwork(band=2100)
