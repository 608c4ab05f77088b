"""Minute / hour / day bucket aggregation of a channel field."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum

import pandas as pd

from .channel import MAX_FIELDS, FeedEntry, TelemetryService


class QueryError(ValueError):
    """Raised for aggregate queries that cannot be answered"""

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class BucketUnit(StrEnum):
    MINUTES = "minutes"
    HOURS = "hours"
    DAYS = "days"


UNIT_MS = {
    BucketUnit.MINUTES: 60_000,
    BucketUnit.HOURS: 3_600_000,
    BucketUnit.DAYS: 86_400_000,
}


class Statistic(StrEnum):
    AVERAGE = "average"
    MIN = "min"
    MAX = "max"
    LAST = "last"
    MEDIAN = "median"
    SUM = "sum"


@dataclass(frozen=True)
class AggregateQuery:
    """Buckets of n units starting at start_ms. Open range ends default to 0 and to the last occupied bucket"""
    bucket: BucketUnit = BucketUnit.MINUTES
    statistic: Statistic = Statistic.AVERAGE
    field: int = 1
    n: int = 1
    start_ms: int | None = None
    end_ms: int | None = None

    def __post_init__(self):
        try:
            object.__setattr__(self, 'bucket', BucketUnit(self.bucket))
            object.__setattr__(self, 'statistic', Statistic(self.statistic))
        except ValueError as exc:
            raise QueryError(str(exc)) from exc
        if self.n <= 0:
            raise QueryError(f"bucket count must be positive, got {self.n}")
        if not 1 <= self.field <= MAX_FIELDS:
            raise QueryError(f"field index must lie in 1..{MAX_FIELDS}, got {self.field}")
        if self.end_ms is not None:
            start = 0 if self.start_ms is None else self.start_ms
            if start >= self.end_ms:
                raise QueryError("range start must precede its end")
            if (self.end_ms - start) % self.span_ms:
                raise QueryError("range must divide into whole buckets")

    @property
    def span_ms(self) -> int:
        return UNIT_MS[self.bucket] * self.n


def feed_frame(entries: Sequence[FeedEntry]) -> pd.DataFrame:
    """One row per entry: created_at_ms plus field1..field8 (NaN where unset)"""
    data = {"created_at_ms": [e.created_at_ms for e in entries]}
    for i in range(1, MAX_FIELDS + 1):
        data[f"field{i}"] = [e.field(i) for e in entries]
    return pd.DataFrame(data).astype({f"field{i}": "float64" for i in range(1, MAX_FIELDS + 1)})


def aggregate_entries(entries: Sequence[FeedEntry], q: AggregateQuery) -> list[tuple[int, float]]:
    """(bucket_start_ms, value) for every non-empty bucket, ascending"""
    if not entries:
        return []
    df = feed_frame(entries)
    column = f"field{q.field}"
    start = 0 if q.start_ms is None else q.start_ms
    df = df[df["created_at_ms"] >= start]
    if q.end_ms is not None:
        df = df[df["created_at_ms"] < q.end_ms]
    df = df.dropna(subset=[column])
    if df.empty:
        return []

    bucket_start = start + ((df["created_at_ms"] - start) // q.span_ms) * q.span_ms
    grouped = df.groupby(bucket_start, sort=True)[column]
    match q.statistic:
        case Statistic.AVERAGE:
            series = grouped.mean()
        case Statistic.MIN:
            series = grouped.min()
        case Statistic.MAX:
            series = grouped.max()
        case Statistic.LAST:
            series = grouped.last()
        case Statistic.MEDIAN:
            series = grouped.median()
        case Statistic.SUM:
            series = grouped.sum()
    return [(int(k), float(v)) for k, v in series.items()]


def aggregate(service: TelemetryService, channel_id: int, q: AggregateQuery) -> list[tuple[int, float]]:
    channel = service.channel(channel_id)
    if q.field > len(channel.field_names):
        raise QueryError(f"channel {channel_id} has no field{q.field}")
    return aggregate_entries(service.snapshot(channel_id), q)
