"""Persisted device parameters and their validation."""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

E164_PATTERN = re.compile(r"^\+\d{8,15}$")
API_KEY_PATTERN = re.compile(r"^[A-Za-z0-9]{16}$")
MAX_CONTACTS = 3


class ConfigError(ValueError):
    """Raised when a DeviceConfig would violate its invariants"""

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


def is_e164(number: str) -> bool:
    return bool(E164_PATTERN.match(number))


def is_api_key(key: str) -> bool:
    return bool(API_KEY_PATTERN.match(key))


@dataclass(frozen=True)
class BpmRange:
    """Inclusive nominal heart-rate range"""
    low: int = 60
    high: int = 100

    def __post_init__(self):
        if not self.low < self.high:
            raise ConfigError(f"nominal bpm range needs low < high, got [{self.low}, {self.high}]")

    def __contains__(self, bpm: int) -> bool:
        return self.low <= bpm <= self.high


@dataclass(frozen=True)
class DeviceConfig:
    """Everything the firmware keeps between readings.

    Times are in seconds as the user configures them; the state machine converts to ms.
    """
    own_number: str
    api_key: str
    contacts: tuple[str, ...] = ()
    nominal_bpm: BpmRange = field(default_factory=BpmRange)
    upload_interval_s: float = 48
    config_window_s: float = 80
    reading_interval_s: float = 4
    vitals_window_s: float = 10

    def __post_init__(self):
        # accept any sequence for contacts but store a tuple
        object.__setattr__(self, 'contacts', tuple(self.contacts))
        problems = []
        if not is_e164(self.own_number):
            problems.append(f"own_number '{self.own_number}' is not E.164")
        if not is_api_key(self.api_key):
            problems.append("api_key must be 16 alphanumeric characters")
        if len(self.contacts) > MAX_CONTACTS:
            problems.append(f"at most {MAX_CONTACTS} contacts, got {len(self.contacts)}")
        for number in self.contacts:
            if not is_e164(number):
                problems.append(f"contact '{number}' is not E.164")
        if len(set(self.contacts)) != len(self.contacts):
            problems.append("duplicate contact numbers")
        for name in ('upload_interval_s', 'config_window_s', 'reading_interval_s'):
            if getattr(self, name) <= 0:
                problems.append(f"{name} must be positive")
        if self.vitals_window_s < 5:
            problems.append("vitals_window_s must be at least 5 s")
        if problems:
            raise ConfigError("; ".join(problems))

    @property
    def upload_interval_ms(self) -> int:
        return int(round(self.upload_interval_s * 1000))

    @property
    def config_window_ms(self) -> int:
        return int(round(self.config_window_s * 1000))

    @property
    def reading_interval_ms(self) -> int:
        return int(round(self.reading_interval_s * 1000))

    @property
    def vitals_window_ms(self) -> int:
        return int(round(self.vitals_window_s * 1000))

    def with_contact(self, number: str) -> DeviceConfig:
        return replace(self, contacts=self.contacts + (number,))

    def without_contact(self, number: str) -> DeviceConfig:
        return replace(self, contacts=tuple(c for c in self.contacts if c != number))

    def with_api_key(self, key: str) -> DeviceConfig:
        return replace(self, api_key=key)

    def to_dict(self) -> dict:
        return {
            "own_number": self.own_number,
            "api_key": self.api_key,
            "contacts": list(self.contacts),
            "nominal_bpm": [self.nominal_bpm.low, self.nominal_bpm.high],
            "upload_interval_s": self.upload_interval_s,
            "config_window_s": self.config_window_s,
            "reading_interval_s": self.reading_interval_s,
            "vitals_window_s": self.vitals_window_s,
        }
