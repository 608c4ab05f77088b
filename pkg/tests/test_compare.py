"""Reference comparison and run report serialization."""

from fractions import Fraction

import pytest

from device import AlertEvent, BpmClass, GeoFix
from harness.compare import REFERENCE, compare_to_reference, comparison_frame, deltas
from harness.figures import metric_cards
from harness.run_report import RunReport


def _report(**overrides) -> RunReport:
    values = {
        "scenario": "nominal-hour",
        "seed": 7,
        "duration_ms": 3_600_000,
        "end_ms": 3_600_000,
        "uploads_attempted": 75,
        "uploads_received": 73,
        "success_ratio": Fraction(73, 75),
        "alerts": (),
        "sms_sent": 0,
        "endurance_hours": Fraction(9),
        "kb_per_hour": Fraction(123_675, 1000),
        "mb_per_day": Fraction(29_682, 10_000),
    }
    values.update(overrides)
    return RunReport(**values)


def _rows(report):
    return {row.metric: row for row in compare_to_reference(report)}


def test_nominal_run_is_within_tolerance():
    rows = _rows(_report())
    assert set(rows) == {ref.metric for ref in REFERENCE}
    assert not any(row.flagged for row in rows.values())
    assert rows["uploads_attempted_per_hour"].relative_delta == 0
    assert rows["kb_per_hour"].delta_text == "-0.020%"
    assert rows["success_ratio"].run_text == "0.9733"


def test_lossless_run_is_flagged():
    rows = _rows(_report(uploads_received=75, success_ratio=Fraction(1)))
    assert rows["uploads_received_per_hour"].flagged
    assert rows["success_ratio"].flagged
    assert not rows["uploads_attempted_per_hour"].flagged


def test_counts_must_match_exactly():
    rows = _rows(_report(end_ms=3_600_000 * 76 // 75))
    assert rows["uploads_attempted_per_hour"].flagged


def test_nothing_attempted_is_undefined_and_flagged():
    rows = _rows(_report(uploads_attempted=0, uploads_received=0, success_ratio=None))
    row = rows["success_ratio"]
    assert row.flagged
    assert row.run_text == "undefined"
    assert row.delta_text == "undefined"
    assert deltas(list(rows.values()))["success_ratio"] is None


def test_zero_length_run_has_no_rates():
    rows = _rows(_report(end_ms=0, uploads_attempted=0, uploads_received=0, success_ratio=None))
    assert rows["uploads_attempted_per_hour"].run_value is None
    assert rows["uploads_attempted_per_hour"].flagged


def test_comparison_frame_columns():
    df = comparison_frame(compare_to_reference(_report()))
    assert list(df.columns) == ["metric", "reference", "run", "relative_delta", "flagged"]
    assert len(df) == len(REFERENCE)
    assert df.loc[df["metric"] == "endurance_hours", "run"].item() == "9.0"


def test_received_cannot_exceed_attempted():
    with pytest.raises(ValueError):
        _report(uploads_received=76)


def test_report_dict_round_trip():
    fix = GeoFix(lat=-2.2269, lon=-80.859, valid=True, t_ms=240_000)
    alert = AlertEvent(t_ms=248_000, kind=BpmClass.BRADYCARDIA, bpm=45, spo2_pct=97, fix=fix,
                       url="https://maps.google.com/?q=-2.226900,-80.859000")
    report = _report(alerts=(alert,), sms_sent=2, deltas={"kb_per_hour": -0.0002})
    data = report.to_dict()
    assert data["success_ratio"] == "73/75"
    assert data["success_ratio_decimal"] == "0.9733"
    assert data["kb_per_hour_decimal"] == 123.675
    assert RunReport.from_dict(data) == report


def test_generator_error_card_names_what_it_stands_in_for():
    cards = {c["title"]: c["value"] for c in metric_cards(_report(oracle_bpm_mae=0.5, oracle_readings=70))}
    assert cards["bpm MAE (generator stand-in for reference oximeter)"] == "0.50"
    assert not any("oximeter" in title for title in
                   (c["title"] for c in metric_cards(_report(oracle_bpm_mae=None))))
