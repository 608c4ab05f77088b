"""ThingSpeak-compatible channels: keyed, append-only feeds with up to 8 numbered fields."""
from __future__ import annotations

import math
import threading
from collections.abc import Mapping
from dataclasses import dataclass, field

from rsxml import Logger

from util.sim_time import iso_timestamp

RATE_LIMIT_MS = 15_000
MAX_FIELDS = 8
DEFAULT_FIELD_NAMES = ("bpm", "SpO2")


class TelemetryException(Exception):
    """Exception raised for errors in the telemetry service.

    Attributes:
        message -- explanation of the error
    """

    def __init__(self, message="Telemetry service encountered an error"):
        self.message = message
        super().__init__(self.message)


class ChannelNotFoundError(TelemetryException, KeyError):
    def __init__(self, channel_id):
        super().__init__(f"Channel {channel_id} not found")
        self.channel_id = channel_id

    def __str__(self):
        return self.message


def format_field(value: float | None) -> str | None:
    """Feed rendering: integral values without a decimal point"""
    if value is None:
        return None
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


@dataclass(frozen=True)
class FeedEntry:
    entry_id: int
    created_at_ms: int
    fields: tuple[float | None, ...] = (None,) * MAX_FIELDS

    @property
    def field1(self) -> float | None:
        return self.fields[0]

    @property
    def field2(self) -> float | None:
        return self.fields[1]

    def field(self, index: int) -> float | None:
        return self.fields[index - 1]

    def to_record(self) -> dict:
        record = {"entry_id": self.entry_id, "created_at_ms": self.created_at_ms}
        for i, value in enumerate(self.fields, start=1):
            if value is not None:
                record[f"field{i}"] = value
        return record

    @classmethod
    def from_record(cls, record: Mapping) -> FeedEntry:
        values = tuple(
            None if record.get(f"field{i}") is None else float(record[f"field{i}"])
            for i in range(1, MAX_FIELDS + 1)
        )
        return cls(entry_id=int(record["entry_id"]), created_at_ms=int(record["created_at_ms"]), fields=values)

    def to_feed_json(self) -> dict:
        """Entry as rendered by feeds.json: ISO created_at, string field values"""
        out = {"created_at": iso_timestamp(self.created_at_ms), "entry_id": self.entry_id}
        for i, value in enumerate(self.fields, start=1):
            if value is not None:
                out[f"field{i}"] = format_field(value)
        return out


@dataclass
class Channel:
    id: int
    write_api_key: str
    field_names: tuple[str, ...] = DEFAULT_FIELD_NAMES
    name: str = ""
    entries: list[FeedEntry] = field(default_factory=list)
    last_update_ms: int | None = None
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self):
        if not 1 <= len(self.field_names) <= MAX_FIELDS:
            raise ValueError(f"a channel has 1 to {MAX_FIELDS} fields, got {len(self.field_names)}")

    def to_json(self) -> dict:
        out = {"id": self.id, "name": self.name, "last_entry_id": len(self.entries)}
        for i, label in enumerate(self.field_names, start=1):
            out[f"field{i}"] = label
        return out


def _parse_fields(params: Mapping[str, str], n_fields: int) -> tuple[float | None, ...] | None:
    """Field values from request parameters; None when any value is malformed or none is present"""
    values: list[float | None] = [None] * MAX_FIELDS
    for i in range(1, MAX_FIELDS + 1):
        raw = params.get(f"field{i}")
        if raw is None:
            continue
        if i > n_fields:
            return None
        try:
            value = float(raw)
        except (TypeError, ValueError):
            return None
        if not math.isfinite(value):
            return None
        values[i - 1] = value
    if all(v is None for v in values):
        return None
    return tuple(values)


class TelemetryService:
    """In-memory channel store. Writes to one channel are serialized by its lock; reads copy under the lock."""

    def __init__(self, rate_limit_ms: int = RATE_LIMIT_MS):
        self.rate_limit_ms = rate_limit_ms
        self.channels: dict[int, Channel] = {}
        self._registry_lock = threading.Lock()
        self._log = Logger('Telemetry')

    def create_channel(self, write_api_key: str, field_names: tuple[str, ...] = DEFAULT_FIELD_NAMES,
                       name: str = "") -> Channel:
        with self._registry_lock:
            if any(c.write_api_key == write_api_key for c in self.channels.values()):
                raise TelemetryException("write api key already in use")
            channel = Channel(id=len(self.channels) + 1, write_api_key=write_api_key,
                              field_names=tuple(field_names), name=name)
            self.channels[channel.id] = channel
        self._log.info(f"Created channel {channel.id} '{name}'")
        return channel

    def channel(self, channel_id: int) -> Channel:
        try:
            return self.channels[int(channel_id)]
        except (KeyError, ValueError) as exc:
            raise ChannelNotFoundError(channel_id) from exc

    def _by_key(self, api_key: str | None) -> Channel | None:
        if not api_key:
            return None
        with self._registry_lock:
            return next((c for c in self.channels.values() if c.write_api_key == api_key), None)

    def handle_update(self, params: Mapping[str, str], now_ms: int) -> int:
        """Store one entry. Returns the new entry id, or 0 when the update is rejected"""
        channel = self._by_key(params.get("api_key"))
        if channel is None:
            self._log.debug(f"t={now_ms} update rejected: unknown api key")
            return 0
        values = _parse_fields(params, len(channel.field_names))
        if values is None:
            self._log.debug(f"t={now_ms} update rejected: malformed or missing fields")
            return 0
        with channel.lock:
            last = channel.last_update_ms
            if last is not None and (now_ms < last or now_ms - last < self.rate_limit_ms):
                self._log.debug(f"t={now_ms} update rejected: rate limited (last {last})")
                return 0
            entry = FeedEntry(entry_id=len(channel.entries) + 1, created_at_ms=now_ms, fields=values)
            channel.entries.append(entry)
            channel.last_update_ms = now_ms
        return entry.entry_id

    def snapshot(self, channel_id: int) -> list[FeedEntry]:
        channel = self.channel(channel_id)
        with channel.lock:
            return list(channel.entries)

    def get_feed(self, channel_id: int, results: int | None = None,
                 start_ms: int | None = None, end_ms: int | None = None) -> list[FeedEntry]:
        """Entries in ascending created_at, optionally limited to [start_ms, end_ms) and to the last `results`"""
        entries = self.snapshot(channel_id)
        if start_ms is not None:
            entries = [e for e in entries if e.created_at_ms >= start_ms]
        if end_ms is not None:
            entries = [e for e in entries if e.created_at_ms < end_ms]
        if results is not None:
            if results < 0:
                raise ValueError("results must not be negative")
            entries = entries[-results:] if results else []
        return entries
