"""Synthetic PPG sensing, FIFO buffering, beat detection and bpm / SpO2 estimation."""

from .types import ADC_MAX, PpgSample, ProfileError, Quality, VitalsProfile, VitalsReading
from .fifo import DEFAULT_FIFO_CAPACITY, SampleFifo
from .synth import DEFAULT_SAMPLE_HZ, PpgSynthesizer, scheduled_beats, synthesize_ppg
from .detect import (
    DEFAULT_DETECTION,
    DetectionParams,
    compute_bpm,
    compute_spo2,
    compute_vitals,
    detect_beats,
    spo2_from_ratio,
)
from .io import read_samples_csv, write_samples_csv

__all__ = [
    "ADC_MAX",
    "DEFAULT_DETECTION",
    "DEFAULT_FIFO_CAPACITY",
    "DEFAULT_SAMPLE_HZ",
    "DetectionParams",
    "PpgSample",
    "PpgSynthesizer",
    "ProfileError",
    "Quality",
    "SampleFifo",
    "VitalsProfile",
    "VitalsReading",
    "compute_bpm",
    "compute_spo2",
    "compute_vitals",
    "detect_beats",
    "read_samples_csv",
    "scheduled_beats",
    "spo2_from_ratio",
    "synthesize_ppg",
    "write_samples_csv",
]
