"""Bucketed bpm / SpO2 series from a telemetry snapshot."""
from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import pandas as pd

from telemetry import AggregateQuery, BucketUnit, FeedEntry, Statistic, aggregate_entries

SERIES_COLUMNS = ["bucket_start_ms", "avg_bpm", "avg_spo2"]


def series_frame(entries: Sequence[FeedEntry], bucket: BucketUnit | str = BucketUnit.MINUTES, n: int = 1) -> pd.DataFrame:
    """Average of field1 and field2 per bucket, outer-joined on the bucket start"""
    columns = {}
    for field_index, column in ((1, "avg_bpm"), (2, "avg_spo2")):
        q = AggregateQuery(bucket=bucket, statistic=Statistic.AVERAGE, field=field_index, n=n)
        rows = aggregate_entries(entries, q)
        columns[column] = pd.Series({start: value for start, value in rows}, dtype="float64")
    df = pd.DataFrame(columns).sort_index()
    df.index.name = "bucket_start_ms"
    df = df.reset_index()
    if df.empty:
        return pd.DataFrame({c: pd.Series(dtype="float64" if c != "bucket_start_ms" else "int64") for c in SERIES_COLUMNS})
    df["bucket_start_ms"] = df["bucket_start_ms"].astype("int64")
    return df[SERIES_COLUMNS]


def export_series(entries: Sequence[FeedEntry], bucket: BucketUnit | str = BucketUnit.MINUTES, n: int = 1) -> str:
    """CSV text `bucket_start_ms,avg_bpm,avg_spo2`; header only for an empty snapshot"""
    return series_frame(entries, bucket, n).to_csv(index=False, lineterminator="\n")


def write_series_csv(entries: Sequence[FeedEntry], path: Path | str, bucket: BucketUnit | str = BucketUnit.MINUTES,
                     n: int = 1) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(export_series(entries, bucket, n))
    return path
