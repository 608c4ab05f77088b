"""Position source behind AT+CGNSINF: a fixed point or a piecewise-linear waypoint track."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from device.geo import GeoFix


@dataclass(frozen=True)
class Waypoint:
    t_ms: int
    lat: float
    lon: float


class GnssTrack:
    """Callable time -> GeoFix. Fixes are invalid before acquire_ms or when no waypoint exists."""

    def __init__(self, waypoints: Sequence[Waypoint], acquire_ms: int = 0):
        self.waypoints = sorted(waypoints, key=lambda w: w.t_ms)
        self.acquire_ms = acquire_ms
        self._t = np.array([w.t_ms for w in self.waypoints], dtype=float)
        self._lat = np.array([w.lat for w in self.waypoints], dtype=float)
        self._lon = np.array([w.lon for w in self.waypoints], dtype=float)

    @classmethod
    def static(cls, lat: float, lon: float, acquire_ms: int = 0) -> GnssTrack:
        return cls([Waypoint(0, lat, lon)], acquire_ms=acquire_ms)

    @classmethod
    def none(cls) -> GnssTrack:
        return cls([])

    def __call__(self, t_ms: int) -> GeoFix:
        if not self.waypoints or t_ms < self.acquire_ms:
            return GeoFix.invalid(t_ms)
        # np.interp holds the end values outside the track
        lat = float(np.interp(t_ms, self._t, self._lat))
        lon = float(np.interp(t_ms, self._t, self._lon))
        return GeoFix(lat=lat, lon=lon, valid=True, t_ms=t_ms)
