"""Deterministic test tones and resampling-based pitch shifting.

These generators back the desk-scale evaluation protocol: no synthesizer is
available, so known-shift pairs are produced by resampling, which moves
pitch and duration together by an exact factor.
"""
from __future__ import annotations

import numpy as np

from .audio import Waveform, resample

__all__ = [
    "sine_tone",
    "harmonic_tone",
    "vibrato_tone",
    "pitch_shifted_copy",
    "random_tonal_frame",
]


def sine_tone(
    freq: float,
    duration: float,
    sample_rate: int = 22050,
    amplitude: float = 0.6,
    phase: float = 0.0,
) -> Waveform:
    """A plain sine at freq Hz."""
    t = np.arange(int(round(duration * sample_rate))) / sample_rate
    return Waveform(amplitude * np.sin(2.0 * np.pi * freq * t + phase), sample_rate)


def harmonic_tone(
    f0: float,
    duration: float,
    sample_rate: int = 22050,
    n_harmonics: int = 6,
    amplitude: float = 0.5,
    seed: int = 0,
) -> Waveform:
    """Harmonic series with 1/h amplitude rolloff and seeded phases."""
    rng = np.random.default_rng(seed)
    t = np.arange(int(round(duration * sample_rate))) / sample_rate
    x = np.zeros_like(t)
    for h in range(1, n_harmonics + 1):
        x += np.sin(2.0 * np.pi * f0 * h * t + rng.uniform(0.0, 2.0 * np.pi)) / h
    return Waveform(amplitude * x / np.max(np.abs(x)), sample_rate)


def vibrato_tone(
    f0: float,
    duration: float,
    sample_rate: int = 22050,
    depth_semitones: float = 0.5,
    rate_hz: float = 5.0,
    amplitude: float = 0.6,
) -> Waveform:
    """Sine with sinusoidal pitch vibrato of +-depth_semitones at rate_hz."""
    t = np.arange(int(round(duration * sample_rate))) / sample_rate
    inst = f0 * 2.0 ** (depth_semitones * np.sin(2.0 * np.pi * rate_hz * t) / 12.0)
    phase = 2.0 * np.pi * np.cumsum(inst) / sample_rate
    return Waveform(amplitude * np.sin(phase), sample_rate)


def pitch_shifted_copy(w: Waveform, semitones: float) -> Waveform:
    """Pitch-shift by resampling and relabeling at the original rate.

    Duration scales by 2^(-semitones/12); the shift is exact up to the
    integer rounding of the intermediate rate (well under a cent).
    """
    target = int(round(w.sample_rate * 2.0 ** (-semitones / 12.0)))
    return Waveform(resample(w, target).samples, w.sample_rate)


def random_tonal_frame(
    rng: np.random.Generator,
    frame_len: int,
    sample_rate: int = 22050,
    noise: float = 1e-3,
) -> np.ndarray:
    """One random harmonic frame: log-uniform f0 in 70..400 Hz, four
    harmonics with random amplitudes and phases, plus a little noise.
    Used as the non-silent input population for gradient checks."""
    f0 = float(np.exp(rng.uniform(np.log(70.0), np.log(400.0))))
    t = np.arange(frame_len) / sample_rate
    x = np.zeros(frame_len)
    for h in range(1, 5):
        x += rng.uniform(0.2, 1.0) / h * np.sin(
            2.0 * np.pi * f0 * h * t + rng.uniform(0.0, 2.0 * np.pi)
        )
    x = 0.5 * x / np.max(np.abs(x))
    return x + noise * rng.standard_normal(frame_len)
