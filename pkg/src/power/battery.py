"""Battery endurance at a constant aggregate draw.

All arithmetic is exact (Fraction). pint quantities are views for reports.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

from rsxml import Logger

from util.units import ureg

DEFAULT_CAPACITY_MAH = 1800
DEFAULT_DRAW_MA = 200
# informational only, no voltage curve is modelled
VOLTAGE_RANGE_V = (3.7, 4.2)
MS_PER_HOUR = 3_600_000


class PowerError(ValueError):
    """Rejected battery parameters"""

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


def endurance_hours(capacity_mah: int | Fraction, draw_ma: int | Fraction) -> Fraction:
    """Hours of operation: capacity / draw

    Raises:
        PowerError: draw is not positive or capacity is negative
    """
    if draw_ma <= 0:
        raise PowerError(f"draw must be positive, got {draw_ma} mA")
    if capacity_mah < 0:
        raise PowerError(f"capacity must not be negative, got {capacity_mah} mAh")
    return Fraction(capacity_mah) / Fraction(draw_ma)


def endurance_quantity(capacity_mah: int | Fraction, draw_ma: int | Fraction):
    """The same endurance as a pint quantity in hours"""
    endurance_hours(capacity_mah, draw_ma)
    capacity = ureg.Quantity(float(capacity_mah), "milliampere * hour")
    draw = ureg.Quantity(float(draw_ma), "milliampere")
    return (capacity / draw).to("hour")


@dataclass(frozen=True)
class BatteryDepleted:
    t_ms: int
    consumed_mah: Fraction

    type = "BatteryDepleted"

    def to_record(self) -> dict:
        return {"t_ms": self.t_ms, "type": self.type, "body": f"battery depleted after {float(self.consumed_mah):g} mAh"}


@dataclass(frozen=True)
class BatteryState:
    capacity_mah: int | Fraction = DEFAULT_CAPACITY_MAH
    draw_ma: int | Fraction = DEFAULT_DRAW_MA
    consumed_mah: Fraction = Fraction(0)
    elapsed_ms: int = 0
    depleted_at_ms: int | None = None

    def __post_init__(self):
        if self.draw_ma <= 0:
            raise PowerError(f"draw must be positive, got {self.draw_ma} mA")
        if self.capacity_mah <= 0:
            raise PowerError(f"capacity must be positive, got {self.capacity_mah} mAh")
        if not 0 <= self.consumed_mah <= self.capacity_mah:
            raise PowerError(f"consumed charge {self.consumed_mah} outside [0, {self.capacity_mah}] mAh")

    @property
    def depleted(self) -> bool:
        return self.consumed_mah >= self.capacity_mah

    @property
    def remaining_mah(self) -> Fraction:
        return Fraction(self.capacity_mah) - self.consumed_mah

    @property
    def endurance_hours(self) -> Fraction:
        return endurance_hours(self.capacity_mah, self.draw_ma)


def drain(state: BatteryState, dt_ms: int) -> BatteryState:
    """Consume draw · dt. Charge is clamped at capacity and the depletion instant is kept.

    Args:
        state (BatteryState): current state, not modified
        dt_ms (int): elapsed milliseconds, 0 or more

    Returns:
        BatteryState: the drained state
    """
    if dt_ms < 0:
        raise PowerError(f"dt must not be negative, got {dt_ms} ms")
    if dt_ms == 0 or state.depleted:
        return replace(state, elapsed_ms=state.elapsed_ms + dt_ms)

    used = Fraction(state.draw_ma) * dt_ms / MS_PER_HOUR
    if state.consumed_mah + used < state.capacity_mah:
        return replace(state, consumed_mah=state.consumed_mah + used, elapsed_ms=state.elapsed_ms + dt_ms)

    until_empty = state.remaining_mah * MS_PER_HOUR / Fraction(state.draw_ma)
    depleted_at = state.elapsed_ms + math.ceil(until_empty)
    Logger('Battery').info(f"Battery depleted at {depleted_at} ms ({float(depleted_at) / MS_PER_HOUR:g} h)")
    return replace(
        state,
        consumed_mah=Fraction(state.capacity_mah),
        elapsed_ms=state.elapsed_ms + dt_ms,
        depleted_at_ms=depleted_at,
    )
