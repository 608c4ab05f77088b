"""Synthetic two-LED PPG streams.

Each beat is a raised-cosine pulse of fixed width added on top of the DC
baseline of each channel, with seeded uniform noise drawn per channel. The
first beat of a stretch falls half a period after its start, then one per
period.
"""
from collections.abc import Iterator

import numpy as np
from rsxml import Logger

from .types import ADC_MAX, PpgSample, ProfileError, VitalsProfile

DEFAULT_SAMPLE_HZ = 100
MIN_SAMPLE_HZ = 25
MAX_SAMPLE_HZ = 1000
PULSE_WIDTH_MS = 300.0
CHUNK_SAMPLES = 6000

SeedLike = int | np.random.SeedSequence | np.random.Generator


def sample_count(duration_ms: int, sample_hz: int) -> int:
    return (duration_ms * sample_hz) // 1000


def scheduled_beats(profile: VitalsProfile, duration_ms: int, start_ms: int = 0) -> list[float]:
    """Beat times the generator places in [start_ms, start_ms + duration_ms). Used as the detection oracle."""
    if not profile.contact:
        return []
    period = profile.period_ms
    n_beats = int(np.ceil((duration_ms - period / 2) / period)) if duration_ms > period / 2 else 0
    return [start_ms + period / 2 + k * period for k in range(n_beats)]


class PpgSynthesizer:
    """Generates one stretch of signal for one profile, in chunks of bounded size.

    Sample i sits at start_ms + floor(i * 1000 / sample_hz). Chunked output is
    identical to a single-shot run since noise is drawn sequentially from one generator.
    """

    def __init__(self, profile: VitalsProfile, duration_ms: int, sample_hz: int = DEFAULT_SAMPLE_HZ,
                 seed: SeedLike = 0, start_ms: int = 0):
        profile.validate()
        if not MIN_SAMPLE_HZ <= sample_hz <= MAX_SAMPLE_HZ:
            raise ProfileError(f"sample_hz must lie in [{MIN_SAMPLE_HZ}, {MAX_SAMPLE_HZ}], got {sample_hz}")
        if duration_ms <= 0:
            raise ProfileError(f"duration_ms must be positive, got {duration_ms}")

        self.profile = profile
        self.duration_ms = duration_ms
        self.sample_hz = sample_hz
        self.start_ms = start_ms
        self.n_samples = sample_count(duration_ms, sample_hz)
        self.n_beats = len(scheduled_beats(profile, duration_ms))
        self._rng = np.random.default_rng(seed)

        if not profile.within_headroom:
            Logger('PpgSynthesizer').warning(
                f"Profile exceeds the ADC range (dc_red={profile.dc_red}, dc_ir={profile.dc_ir}, "
                f"ac={profile.ac_amplitude}, noise={profile.noise_amplitude}); samples will be clamped"
            )

    def _pulse(self, t_rel: np.ndarray) -> np.ndarray:
        """Pulse train value in [0, 1] at times relative to the stretch start"""
        pulse = np.zeros_like(t_rel, dtype=float)
        if not self.profile.contact or self.n_beats == 0:
            return pulse
        period = self.profile.period_ms
        half = PULSE_WIDTH_MS / 2
        nearest = np.floor((t_rel - period / 2) / period).astype(np.int64)
        # at most two pulses overlap for periods >= the pulse width; scan neighbours
        for offset in (-1, 0, 1, 2):
            k = nearest + offset
            valid = (k >= 0) & (k < self.n_beats)
            delta = t_rel - (period / 2 + k * period)
            inside = valid & (np.abs(delta) <= half)
            pulse[inside] += 0.5 * (1.0 + np.cos(2.0 * np.pi * delta[inside] / PULSE_WIDTH_MS))
        return pulse

    def chunks(self, max_samples: int = CHUNK_SAMPLES) -> Iterator[tuple[np.ndarray, np.ndarray, np.ndarray]]:
        """Yield (t_ms, red, ir) int64 arrays covering the whole stretch in order"""
        p = self.profile
        for first in range(0, self.n_samples, max_samples):
            idx = np.arange(first, min(first + max_samples, self.n_samples), dtype=np.int64)
            t_rel = (idx * 1000) // self.sample_hz
            pulse = self._pulse(t_rel.astype(float))
            noise = self._rng.uniform(-p.noise_amplitude, p.noise_amplitude, size=(len(idx), 2))
            red = p.dc_red + p.red_ac * pulse + noise[:, 0]
            ir = p.dc_ir + p.ac_amplitude * pulse + noise[:, 1]
            red = np.clip(np.rint(red), 0, ADC_MAX).astype(np.int64)
            ir = np.clip(np.rint(ir), 0, ADC_MAX).astype(np.int64)
            yield t_rel + self.start_ms, red, ir

    def samples(self) -> Iterator[PpgSample]:
        for t, red, ir in self.chunks():
            for ti, ri, ii in zip(t.tolist(), red.tolist(), ir.tolist()):
                yield PpgSample(ti, ri, ii)


def synthesize_ppg(profile: VitalsProfile, duration_ms: int, sample_hz: int = DEFAULT_SAMPLE_HZ,
                   seed: SeedLike = 0, start_ms: int = 0) -> list[PpgSample]:
    """Generate duration_ms * sample_hz / 1000 samples for a profile.

    Args:
        profile (VitalsProfile): generator settings
        duration_ms (int): stretch length, > 0
        sample_hz (int): sample rate, >= 25
        seed: integer seed, SeedSequence or an existing Generator to continue drawing from
        start_ms (int): timestamp of the first sample

    Returns:
        list[PpgSample]: samples in time order
    """
    return list(PpgSynthesizer(profile, duration_ms, sample_hz, seed=seed, start_ms=start_ms).samples())
