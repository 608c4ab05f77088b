"""Loss models, GNSS track interpolation and the network ledger."""

from fractions import Fraction

import numpy as np
import pytest

from device import HttpUpdate
from modem import DEFAULT_HTTP_LOSS, GnssTrack, LossModel, LossRoller, SmsMessage, VirtualNetwork, Waypoint, as_probability, http_bridge
from telemetry import TelemetryService


@pytest.mark.parametrize("value,expected", [
    (0, Fraction(0)),
    (1, Fraction(1)),
    (0.2, Fraction(1, 5)),
    ("2/75", Fraction(2, 75)),
    (Fraction(3, 7), Fraction(3, 7)),
])
def test_as_probability(value, expected):
    assert as_probability(value) == expected


@pytest.mark.parametrize("value", [-0.1, 1.5, "4/3"])
def test_as_probability_out_of_range(value):
    with pytest.raises(ValueError):
        as_probability(value)


@pytest.mark.parametrize("seed", range(200))
def test_stratified_loss_is_exact_per_block(seed):
    roller = LossRoller(DEFAULT_HTTP_LOSS, LossModel.STRATIFIED, np.random.default_rng(seed))
    outcomes = [roller.delivered() for _ in range(75 * 4)]
    for block in range(4):
        assert sum(outcomes[block * 75:(block + 1) * 75]) == 73


def test_bernoulli_mean_over_seeds():
    received = []
    for seed in range(100):
        roller = LossRoller(DEFAULT_HTTP_LOSS, LossModel.BERNOULLI, np.random.default_rng(seed))
        received.append(sum(roller.delivered() for _ in range(75)))
    assert 72 <= np.mean(received) <= 74


def test_zero_probability_never_drops():
    roller = LossRoller(Fraction(0), LossModel.BERNOULLI, np.random.default_rng(0))
    assert all(roller.delivered() for _ in range(1000))


def test_certain_loss_always_drops():
    for model in LossModel:
        roller = LossRoller(Fraction(1), model, np.random.default_rng(0))
        assert not any(roller.delivered() for _ in range(100))


def test_same_seed_same_outcomes():
    def outcomes(seed):
        network = VirtualNetwork(seed=seed, sms_loss_prob=0.3, http_loss_prob=0.3)
        sms = [network.submit_sms(SmsMessage("+593990000001", "+593991111111", "x", t)) for t in range(200)]
        http = [network.http_request("http://api.thingspeak.com/update", t)[0] for t in range(200)]
        return sms, http

    assert outcomes(8) == outcomes(8)
    assert outcomes(8) != outcomes(9)


def test_sms_and_http_rolls_are_independent():
    quiet = VirtualNetwork(seed=4, sms_loss_prob=0.5, http_loss_prob=0.5)
    busy = VirtualNetwork(seed=4, sms_loss_prob=0.5, http_loss_prob=0.5)
    for t in range(50):
        busy.submit_sms(SmsMessage("+593990000001", "+593991111111", "x", t))
    a = [quiet.http_request("http://h/update", t)[0] for t in range(50)]
    b = [busy.http_request("http://h/update", t)[0] for t in range(50)]
    assert a == b


def test_counts_and_ledger_records():
    service = TelemetryService(rate_limit_ms=0)
    service.create_channel("PULSESIM00000001")
    network = VirtualNetwork(seed=1, sms_loss_prob=1, http_loss_prob=0, telemetry=service)
    network.submit_sms(SmsMessage("+593990000001", "+593991111111", "lost", 10))
    status, body = network.http_request("http://api.thingspeak.com/update?api_key=PULSESIM00000001&field1=70", 5)
    assert (status, body) == (200, "1")
    assert network.http_request("http://api.thingspeak.com/elsewhere", 20) == (404, "")

    assert network.counts() == {
        "sms": {"submitted": 1, "delivered": 0, "dropped": 1},
        "http": {"submitted": 2, "delivered": 2, "dropped": 0},
    }
    records = network.ledger_records()
    assert [r["t_ms"] for r in records] == [5, 10, 20]
    assert records[1]["kind"] == "sms" and records[1]["delivered"] is False
    assert [d.kind for d in network.dropped] == ["sms"]


def test_http_bridge_uses_the_request_time():
    service = TelemetryService()
    channel = service.create_channel("PULSESIM00000001")
    network = VirtualNetwork(http_loss_prob=0, telemetry=service)
    request = HttpUpdate(t_ms=96_000, query=(("api_key", "PULSESIM00000001"), ("field1", "80"), ("field2", "98")))
    assert http_bridge(request, network) == (200, "1")
    assert service.snapshot(channel.id)[0].created_at_ms == 96_000


def test_inbound_for_unknown_device_is_ignored():
    network = VirtualNetwork()
    assert network.deliver_inbound(SmsMessage("+593991111111", "+593990000009", "CFG", 0)) == []


def test_gnss_track_interpolates_and_holds_ends():
    track = GnssTrack([Waypoint(0, -2.0, -80.0), Waypoint(100_000, -3.0, -81.0)], acquire_ms=10_000)
    assert not track(5_000).valid
    mid = track(50_000)
    assert mid.valid
    assert mid.lat == pytest.approx(-2.5)
    assert mid.lon == pytest.approx(-80.5)
    assert track(500_000).lat == pytest.approx(-3.0)


def test_empty_track_never_fixes():
    assert not GnssTrack.none()(0).valid
