"""GNSS fixes and the map link sent in alert messages."""
from __future__ import annotations

import re
from dataclasses import dataclass

MAPS_URL_PATTERN = re.compile(r"^https://maps\.google\.com/\?q=-?\d+\.\d{6},-?\d+\.\d{6}$")


@dataclass(frozen=True)
class GeoFix:
    lat: float
    lon: float
    valid: bool
    t_ms: int

    def __post_init__(self):
        if self.valid and not (-90 <= self.lat <= 90 and -180 <= self.lon <= 180):
            raise ValueError(f"fix out of range: {self.lat}, {self.lon}")

    @classmethod
    def invalid(cls, t_ms: int) -> GeoFix:
        return cls(lat=0.0, lon=0.0, valid=False, t_ms=t_ms)


def maps_url(fix: GeoFix) -> str:
    """Google Maps link for a valid fix, coordinates at 6 decimals"""
    if not fix.valid:
        raise ValueError("an invalid fix has no location URL")
    return f"https://maps.google.com/?q={fix.lat:.6f},{fix.lon:.6f}"
