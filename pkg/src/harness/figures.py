"""Figures and tables for the HTML run report"""
from collections.abc import Sequence

import pandas as pd
import plotly.graph_objects as go
from plotly.subplots import make_subplots

from .compare import ComparisonRow
from .run_report import RunReport


def vitals_chart(series: pd.DataFrame, nominal: tuple[int, int] = (60, 100)) -> go.Figure:
    """bpm and SpO2 bucket averages on twin y axes, with the nominal bpm band shaded

    Args:
        series (pd.DataFrame): bucket_start_ms, avg_bpm, avg_spo2 as produced by export.series_frame
        nominal (tuple[int, int]): low / high of the nominal bpm range
    """
    minutes = series["bucket_start_ms"] / 60_000
    fig = make_subplots(specs=[[{"secondary_y": True}]])
    fig.add_trace(go.Scatter(x=minutes, y=series["avg_bpm"], name="bpm", mode="lines+markers",
                             line={"color": "#c0392b"}), secondary_y=False)
    fig.add_trace(go.Scatter(x=minutes, y=series["avg_spo2"], name="SpO2 %", mode="lines+markers",
                             line={"color": "#2471a3"}), secondary_y=True)
    fig.add_hrect(y0=nominal[0], y1=nominal[1], fillcolor="#27ae60", opacity=0.08, line_width=0)
    fig.update_xaxes(title_text="Simulated time (min)")
    fig.update_yaxes(title_text="Heart rate (bpm)", secondary_y=False)
    fig.update_yaxes(title_text="SpO2 (%)", range=[70, 101], secondary_y=True)
    fig.update_layout(margin={"l": 40, "r": 40, "t": 30, "b": 40}, legend={"orientation": "h"})
    return fig


def comparison_table(rows: Sequence[ComparisonRow]) -> list[dict]:
    """Rows ready for the template"""
    return [
        {
            "label": r.label,
            "reference": r.reference_text,
            "run": r.run_text,
            "delta": r.delta_text,
            "flagged": r.flagged,
        }
        for r in rows
    ]


def metric_cards(report: RunReport) -> list[dict]:
    cards = [
        {"title": "Uploads attempted", "value": str(report.uploads_attempted)},
        {"title": "Uploads received", "value": str(report.uploads_received)},
        {"title": "Delivery ratio", "value": report.ratio_text},
        {"title": "Alerts", "value": str(len(report.alerts))},
        {"title": "SMS sent", "value": str(report.sms_sent)},
    ]
    if report.oracle_bpm_mae is not None:
        cards.append({"title": "bpm MAE (generator stand-in for reference oximeter)", "value": f"{report.oracle_bpm_mae:.2f}"})
    if report.battery_depleted_at_ms is not None:
        cards.append({"title": "Battery depleted at", "value": f"{report.battery_depleted_at_ms / 3_600_000:g} h"})
    return cards
