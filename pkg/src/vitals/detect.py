"""Beat detection and bpm / SpO2 estimation over sample windows.

Detection runs on the IR channel: a short moving average smooths the signal, a
1 s moving average gives the baseline, and a beat is a local maximum rising
more than half the recent peak-to-baseline excursion above the baseline, found
with scipy.signal.find_peaks. Of peaks closer than the refractory period only
the tallest survives. A pulse cut by the window edge has too little prominence
to count.
"""
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import find_peaks

from .types import BPM_RANGE, SPO2_RANGE, PpgSample, Quality, VitalsReading

# Empirical first-order calibration line: SpO2 = intercept - slope * R
SPO2_INTERCEPT = 110.0
SPO2_SLOPE = 25.0

MIN_BPM_WINDOW_MS = 5000
MIN_BEATS_FOR_BPM = 3
MAX_IBI_CV = 0.25


@dataclass(frozen=True)
class DetectionParams:
    """Thresholds used by detect_beats"""
    smoothing_ms: float = 50.0
    baseline_ms: float = 1000.0
    excursion_ms: float = 2000.0
    threshold_fraction: float = 0.5
    refractory_ms: float = 250.0
    min_excursion: float = 64.0
    min_duration_ms: float = 2000.0
    peak_search_ms: float = 30.0
    min_snr: float = 6.0


DEFAULT_DETECTION = DetectionParams()


def as_arrays(samples: Sequence[PpgSample]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(t_ms, red, ir) as float arrays"""
    n = len(samples)
    t = np.fromiter((s.t_ms for s in samples), dtype=float, count=n)
    red = np.fromiter((s.red for s in samples), dtype=float, count=n)
    ir = np.fromiter((s.ir for s in samples), dtype=float, count=n)
    return t, red, ir


def _window_len(span_ms: float, period_ms: float, n: int) -> int:
    """Odd sample count covering span_ms, never longer than the signal"""
    width = max(1, int(round(span_ms / period_ms)))
    if width % 2 == 0:
        width += 1
    limit = n if n % 2 == 1 else n - 1
    return max(1, min(width, limit))


def moving_average(x: np.ndarray, width: int) -> np.ndarray:
    """Centered moving average, normalized by the number of samples actually covered near the edges"""
    kernel = np.ones(width)
    total = np.convolve(x, kernel, mode='same')
    counts = np.convolve(np.ones_like(x), kernel, mode='same')
    return total / counts


def moving_max(x: np.ndarray, width: int) -> np.ndarray:
    half = width // 2
    padded = np.pad(x, half, constant_values=-np.inf)
    return sliding_window_view(padded, 2 * half + 1).max(axis=1)


def sample_period_ms(t: np.ndarray) -> float:
    if len(t) < 2:
        return 0.0
    return float(np.median(np.diff(t)))


def _detect_indices(t: np.ndarray, ir: np.ndarray, params: DetectionParams) -> tuple[np.ndarray, np.ndarray]:
    """Beat sample indices plus the smoothed IR signal"""
    n = len(t)
    period = sample_period_ms(t)
    if n < 3 or period <= 0 or (t[-1] - t[0] + period) < params.min_duration_ms:
        return np.array([], dtype=np.int64), ir

    smooth = moving_average(ir, _window_len(params.smoothing_ms, period, n))
    baseline = moving_average(smooth, _window_len(params.baseline_ms, period, n))
    rise = smooth - baseline
    envelope = moving_max(rise, _window_len(params.excursion_ms, period, n))
    # pulses must stand clear of the sample noise; MAD of the smoothing residual estimates its spread
    spread = 1.4826 * float(np.median(np.abs(ir - smooth)))
    floor = max(params.min_excursion, params.min_snr * spread)
    if envelope.max() < floor:
        return np.array([], dtype=np.int64), smooth

    # samples whose recent excursion is too small never qualify
    height = np.where(envelope >= floor, params.threshold_fraction * envelope, np.inf)
    peaks, _props = find_peaks(
        rise,
        height=height,
        distance=max(1, int(round(params.refractory_ms / period))),
        prominence=params.threshold_fraction * params.min_excursion,
    )
    return peaks.astype(np.int64), smooth


def detect_beats(samples: Sequence[PpgSample], params: DetectionParams = DEFAULT_DETECTION) -> list[int]:
    """Timestamps (ms) of IR pulse peaks. Flat or too-short input gives []"""
    if not samples:
        return []
    t, _red, ir = as_arrays(samples)
    idx, _smooth = _detect_indices(t, ir, params)
    return [int(t[i]) for i in idx]


def compute_bpm(beats: Sequence[float], window_ms: int, end_ms: float | None = None) -> int | Quality:
    """round(60000 / mean inter-beat interval) over the beats inside the window.

    The window ends at end_ms, or at the last beat when end_ms is None.
    Returns Quality.UNSTABLE for fewer than 3 beats or an interval
    coefficient of variation above 0.25.
    """
    if window_ms < MIN_BPM_WINDOW_MS:
        raise ValueError(f"window_ms must be at least {MIN_BPM_WINDOW_MS}, got {window_ms}")
    if not beats:
        return Quality.UNSTABLE
    end = beats[-1] if end_ms is None else end_ms
    inside = np.asarray([b for b in beats if end - window_ms <= b <= end], dtype=float)
    if len(inside) < MIN_BEATS_FOR_BPM:
        return Quality.UNSTABLE
    ibi = np.diff(inside)
    mean = float(ibi.mean())
    if mean <= 0 or float(ibi.std()) / mean > MAX_IBI_CV:
        return Quality.UNSTABLE
    return int(round(60000.0 / mean))


def spo2_from_ratio(r: float) -> int:
    return int(min(100, max(0, round(SPO2_INTERCEPT - SPO2_SLOPE * r))))


def pulse_amplitude(x: np.ndarray, t: np.ndarray, beat_idx: np.ndarray, params: DetectionParams) -> float:
    """Median peak-to-trough amplitude over consecutive beat pairs.

    The trough is the minimum between two beats, keeping clear of both pulses
    by half the refractory period when the interval allows.
    """
    amplitudes = []
    guard = params.refractory_ms / 2
    for prev, cur in zip(beat_idx[:-1], beat_idx[1:]):
        near = np.abs(t - t[cur]) <= params.peak_search_ms
        peak = x[near].max()
        between = (t > t[prev] + guard) & (t < t[cur] - guard)
        if not between.any():
            between = (t > t[prev]) & (t < t[cur])
        if not between.any():
            continue
        amplitudes.append(peak - x[between].min())
    if not amplitudes:
        return 0.0
    return float(np.median(amplitudes))


def _spo2_from_arrays(t, red, ir, beat_idx, params) -> int | Quality:
    dc_red = float(red.mean())
    dc_ir = float(ir.mean())
    if dc_red <= 0 or dc_ir <= 0 or len(beat_idx) < 2:
        return Quality.NO_CONTACT
    period = sample_period_ms(t)
    width = _window_len(params.smoothing_ms, period, len(t))
    ac_red = pulse_amplitude(moving_average(red, width), t, beat_idx, params)
    ac_ir = pulse_amplitude(moving_average(ir, width), t, beat_idx, params)
    if ac_red <= 0 or ac_ir <= 0:
        return Quality.NO_CONTACT
    r = (ac_red / dc_red) / (ac_ir / dc_ir)
    return spo2_from_ratio(r)


def _window(samples: Sequence[PpgSample], window_ms: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    t, red, ir = as_arrays(samples)
    keep = t >= t[-1] - window_ms
    return t[keep], red[keep], ir[keep]


def compute_spo2(samples: Sequence[PpgSample], window_ms: int,
                 params: DetectionParams = DEFAULT_DETECTION) -> int | Quality:
    """SpO2 percent from the ratio of ratios over the last window_ms of samples.

    AC is the peak-to-trough pulse amplitude, DC the window mean of each channel.
    Zero DC or fewer than 2 detected beats gives Quality.NO_CONTACT.
    """
    if not samples:
        return Quality.NO_CONTACT
    t, red, ir = _window(samples, window_ms)
    beat_idx, _smooth = _detect_indices(t, ir, params)
    return _spo2_from_arrays(t, red, ir, beat_idx, params)


def compute_vitals(samples: Sequence[PpgSample], window_ms: int, t_ms: int | None = None,
                   params: DetectionParams = DEFAULT_DETECTION) -> VitalsReading:
    """One VitalsReading over the last window_ms of samples, stamped t_ms (defaults to the newest sample)"""
    if not samples:
        return VitalsReading.rejected(t_ms or 0, Quality.NO_CONTACT)
    stamp = samples[-1].t_ms if t_ms is None else t_ms
    t, red, ir = _window(samples, window_ms)
    beat_idx, _smooth = _detect_indices(t, ir, params)
    if len(beat_idx) < 2:
        return VitalsReading.rejected(stamp, Quality.NO_CONTACT)

    bpm = compute_bpm(t[beat_idx].tolist(), max(window_ms, MIN_BPM_WINDOW_MS), end_ms=float(t[-1]))
    if isinstance(bpm, Quality):
        return VitalsReading.rejected(stamp, bpm)
    spo2 = _spo2_from_arrays(t, red, ir, beat_idx, params)
    if isinstance(spo2, Quality):
        return VitalsReading.rejected(stamp, spo2)
    if not (BPM_RANGE[0] <= bpm <= BPM_RANGE[1] and SPO2_RANGE[0] <= spo2 <= SPO2_RANGE[1]):
        return VitalsReading.rejected(stamp, Quality.UNSTABLE)
    return VitalsReading.good(stamp, bpm, spo2)
