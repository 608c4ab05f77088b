"""ThingSpeak-compatible ingestion, feed retrieval and bucket aggregation."""

from .channel import (
    DEFAULT_FIELD_NAMES,
    MAX_FIELDS,
    RATE_LIMIT_MS,
    Channel,
    ChannelNotFoundError,
    FeedEntry,
    TelemetryException,
    TelemetryService,
    format_field,
)
from .aggregate import (
    AggregateQuery,
    BucketUnit,
    QueryError,
    Statistic,
    aggregate,
    aggregate_entries,
    feed_frame,
)
from .delivery import DeliveryReport, delivery_report
from .snapshot import load_snapshot, save_snapshot
from .urls import parse_request_target, parse_update_values

__all__ = [
    "DEFAULT_FIELD_NAMES",
    "MAX_FIELDS",
    "RATE_LIMIT_MS",
    "AggregateQuery",
    "BucketUnit",
    "Channel",
    "ChannelNotFoundError",
    "DeliveryReport",
    "FeedEntry",
    "QueryError",
    "Statistic",
    "TelemetryException",
    "TelemetryService",
    "aggregate",
    "aggregate_entries",
    "delivery_report",
    "feed_frame",
    "format_field",
    "load_snapshot",
    "parse_request_target",
    "parse_update_values",
    "save_snapshot",
]
