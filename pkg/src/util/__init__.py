"""Utility helpers shared across the simulator packages."""

from .sim_time import SIM_EPOCH, gnss_utc, iso_timestamp, sim_datetime, sms_timestamp
from .units import format_value, ureg

__all__ = [
    "SIM_EPOCH",
    "format_value",
    "gnss_utc",
    "iso_timestamp",
    "sim_datetime",
    "sms_timestamp",
    "ureg",
]
