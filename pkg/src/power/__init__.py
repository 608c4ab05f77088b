"""Battery endurance and mobile-data accounting."""

from .battery import (
    DEFAULT_CAPACITY_MAH,
    DEFAULT_DRAW_MA,
    VOLTAGE_RANGE_V,
    BatteryDepleted,
    BatteryState,
    PowerError,
    drain,
    endurance_hours,
    endurance_quantity,
)
from .data_ledger import PER_UPLOAD_BYTES, DataEvent, DataLedger, Projection, power_report, projection_report, record_upload

__all__ = [
    "DEFAULT_CAPACITY_MAH",
    "DEFAULT_DRAW_MA",
    "PER_UPLOAD_BYTES",
    "VOLTAGE_RANGE_V",
    "BatteryDepleted",
    "BatteryState",
    "DataEvent",
    "DataLedger",
    "PowerError",
    "Projection",
    "drain",
    "endurance_hours",
    "endurance_quantity",
    "power_report",
    "projection_report",
    "record_upload",
]
