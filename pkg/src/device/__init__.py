"""Firmware state machine of the wearable: configuration, alerting and upload scheduling."""

from .config import MAX_CONTACTS, BpmRange, ConfigError, DeviceConfig, is_api_key, is_e164
from .geo import MAPS_URL_PATTERN, GeoFix, maps_url
from .effects import (
    AlertEvent,
    AlertRaised,
    BpmClass,
    ConfigChanged,
    Diagnostic,
    DisplayEvent,
    Effect,
    HttpUpdate,
    SendSms,
)
from .core import (
    DeviceState,
    Mode,
    TickInputs,
    build_alert_sms,
    build_update_request,
    classify_bpm,
    handle_config_sms,
    tick,
)

__all__ = [
    "MAPS_URL_PATTERN",
    "MAX_CONTACTS",
    "AlertEvent",
    "AlertRaised",
    "BpmClass",
    "BpmRange",
    "ConfigChanged",
    "ConfigError",
    "DeviceConfig",
    "DeviceState",
    "Diagnostic",
    "DisplayEvent",
    "Effect",
    "GeoFix",
    "HttpUpdate",
    "Mode",
    "SendSms",
    "TickInputs",
    "build_alert_sms",
    "build_update_request",
    "classify_bpm",
    "handle_config_sms",
    "is_api_key",
    "is_e164",
    "maps_url",
    "tick",
]
