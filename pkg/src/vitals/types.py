"""Value types shared by the vitals pipeline: raw samples, generator profiles and derived readings."""
from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum

# 16 bit ADC
ADC_MAX = 65535

BPM_RANGE = (20, 250)
SPO2_RANGE = (70, 100)


class ProfileError(ValueError):
    """Raised when a VitalsProfile carries out-of-range generator settings"""

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class Quality(StrEnum):
    """Signal quality attached to every reading"""
    GOOD = "Good"
    NO_CONTACT = "NoContact"
    UNSTABLE = "Unstable"


@dataclass(frozen=True, slots=True)
class PpgSample:
    """One two-channel ADC sample (red 660 nm, IR 940 nm)."""
    t_ms: int
    red: int
    ir: int

    def __post_init__(self):
        if not (0 <= self.red <= ADC_MAX and 0 <= self.ir <= ADC_MAX):
            raise ValueError(f"ADC counts out of range at t={self.t_ms}: red={self.red} ir={self.ir}")


@dataclass(frozen=True)
class VitalsProfile:
    """Generator settings for one stretch of synthetic signal.

    target_bpm is the ground truth the detector has to recover. The AC amplitude
    applies to the IR channel; the red amplitude is derived so that the ratio of
    ratios equals spo2_ratio_r.
    """
    target_bpm: float = 75.0
    spo2_ratio_r: float = 0.52
    dc_red: int = 40000
    dc_ir: int = 40000
    ac_amplitude: float = 2000.0
    noise_amplitude: float = 10.0
    contact: bool = True

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        """Raise ProfileError for settings no sensor could produce"""
        if self.target_bpm <= 0:
            raise ProfileError(f"target_bpm must be positive, got {self.target_bpm}")
        if not 0 < self.spo2_ratio_r <= 3.4:
            raise ProfileError(f"spo2_ratio_r must lie in (0, 3.4], got {self.spo2_ratio_r}")
        if self.ac_amplitude < 0 or self.noise_amplitude < 0:
            raise ProfileError("ac_amplitude and noise_amplitude must not be negative")
        for name, dc in (("dc_red", self.dc_red), ("dc_ir", self.dc_ir)):
            if not 0 < dc <= ADC_MAX:
                raise ProfileError(f"{name} must lie in (0, {ADC_MAX}], got {dc}")

    @property
    def red_ac(self) -> float:
        """Red pulse amplitude that encodes spo2_ratio_r against the IR channel"""
        return self.spo2_ratio_r * self.ac_amplitude * self.dc_red / self.dc_ir

    @property
    def within_headroom(self) -> bool:
        """True when dc ± (ac + noise) fits the ADC on both channels"""
        for dc, ac in ((self.dc_red, self.red_ac), (self.dc_ir, self.ac_amplitude)):
            if dc + ac + self.noise_amplitude > ADC_MAX or dc - self.noise_amplitude < 0:
                return False
        return True

    @property
    def period_ms(self) -> float:
        return 60000.0 / self.target_bpm


@dataclass(frozen=True)
class VitalsReading:
    """bpm and SpO2 derived over one window. Only Good readings carry values."""
    t_ms: int
    quality: Quality
    bpm: int | None = None
    spo2_pct: int | None = None

    def __post_init__(self):
        if self.quality is Quality.GOOD:
            if self.bpm is None or self.spo2_pct is None:
                raise ValueError("a Good reading needs both bpm and spo2_pct")
            if not BPM_RANGE[0] <= self.bpm <= BPM_RANGE[1]:
                raise ValueError(f"bpm {self.bpm} outside {BPM_RANGE}")
            if not SPO2_RANGE[0] <= self.spo2_pct <= SPO2_RANGE[1]:
                raise ValueError(f"spo2 {self.spo2_pct} outside {SPO2_RANGE}")
        elif self.bpm is not None or self.spo2_pct is not None:
            raise ValueError(f"{self.quality} reading must not carry values")

    @classmethod
    def good(cls, t_ms: int, bpm: int, spo2_pct: int) -> VitalsReading:
        return cls(t_ms=t_ms, quality=Quality.GOOD, bpm=bpm, spo2_pct=spo2_pct)

    @classmethod
    def rejected(cls, t_ms: int, quality: Quality) -> VitalsReading:
        return cls(t_ms=t_ms, quality=quality)

    @property
    def is_good(self) -> bool:
        return self.quality is Quality.GOOD
