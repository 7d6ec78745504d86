"""YIN primitives: difference function, CMND and a threshold f0 estimator.

All arithmetic runs in 64-bit floats; gradient verification elsewhere in the
package depends on that.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

from .audio import Frame

__all__ = [
    "DifferenceCurve",
    "CmndCurve",
    "CMND_EPS",
    "difference_function",
    "cmnd",
    "parabolic_refine",
    "estimate_f0",
]

# Denominator guard for the cumulative mean. Below this the curve is defined
# as 1 everywhere, which marks silence as unvoiced.
CMND_EPS = 1e-8

DEFAULT_WINDOW = 2048
DEFAULT_THRESHOLD = 0.1
DEFAULT_VOICING_CUTOFF = 0.25
DEFAULT_F_MIN = 52.0
DEFAULT_F_MAX = 508.0


@dataclass(frozen=True)
class DifferenceCurve:
    """Squared-difference values d(tau) for tau = 0..tau_max."""

    values: np.ndarray
    window_size: int

    @property
    def tau_max(self) -> int:
        return len(self.values) - 1


@dataclass(frozen=True)
class CmndCurve:
    """Cumulative mean normalized difference d'(tau); d'(0) = 1."""

    values: np.ndarray
    sample_rate: int

    @property
    def tau_max(self) -> int:
        return len(self.values) - 1


def _as_samples(frame) -> np.ndarray:
    if isinstance(frame, Frame):
        return np.asarray(frame.samples, dtype=np.float64)
    return np.asarray(frame, dtype=np.float64)


def _difference_naive(x: np.ndarray, tau_max: int, window: int) -> np.ndarray:
    head = x[:window]
    d = np.empty(tau_max + 1)
    for tau in range(tau_max + 1):
        delta = head - x[tau : tau + window]
        d[tau] = np.dot(delta, delta)
    return d


def _difference_fft(x: np.ndarray, tau_max: int, window: int) -> np.ndarray:
    # d(tau) = p0 + p_tau - 2*c(tau) with p_tau a sliding energy window and
    # c the linear cross-correlation of x[:window] against x, via FFT.
    n = scipy.fft.next_fast_len(len(x))
    spec_all = scipy.fft.rfft(x, n)
    spec_head = scipy.fft.rfft(x[:window], n)
    corr = scipy.fft.irfft(np.conj(spec_head) * spec_all, n)[: tau_max + 1]
    csum = np.concatenate(([0.0], np.cumsum(x * x)))
    taus = np.arange(tau_max + 1)
    p0 = csum[window]
    p_tau = csum[taus + window] - csum[taus]
    d = p0 + p_tau - 2.0 * corr
    # cancellation noise sits ~1e-13 relative to the summed energies; clamp
    # well above it (and far below real CMND valleys at ~1e-6 relative) so
    # constant or silent frames produce exact zeros like the naive path
    d[d < 1e-11 * (p0 + p_tau)] = 0.0
    return d


def difference_function(
    frame: Frame | np.ndarray,
    tau_max: int,
    window: int = DEFAULT_WINDOW,
    method: str = "fft",
) -> DifferenceCurve:
    """Compute d(tau) = sum_{j<window} (x[j] - x[j+tau])^2 for tau = 0..tau_max.

    Args:
        frame: analysis frame; must hold at least window + tau_max samples.
        tau_max: largest lag, inclusive.
        window: integration window W in samples.
        method: "fft" for the accelerated path, "naive" for direct summation.
            Both produce the same values up to float rounding.
    """
    x = _as_samples(frame)
    if len(x) < window + tau_max:
        raise ValueError(
            f"insufficient frame length: need {window + tau_max}, got {len(x)}"
        )
    if method == "naive":
        d = _difference_naive(x, tau_max, window)
    elif method == "fft":
        d = _difference_fft(x, tau_max, window)
    else:
        raise ValueError(f"unknown method {method!r}")
    return DifferenceCurve(d, window)


def cmnd(d: DifferenceCurve, sample_rate: int) -> CmndCurve:
    """Cumulative mean normalized difference of a DifferenceCurve.

    d'(0) = 1 and d'(tau) = d(tau) * tau / sum_{j<=tau} d(j). Where the
    cumulative sum falls below CMND_EPS the value is defined as 1, so
    silence yields a flat curve and is marked unvoiced downstream.
    """
    vals = d.values
    out = np.ones_like(vals)
    csum = np.cumsum(vals[1:])
    taus = np.arange(1, len(vals))
    guarded = csum < CMND_EPS
    out[1:] = np.where(guarded, 1.0, vals[1:] * taus / np.maximum(csum, CMND_EPS))
    return CmndCurve(out, sample_rate)


def parabolic_refine(c: CmndCurve, tau: int) -> float:
    """Refine an integer lag to the vertex of the parabola through its
    neighbors, clamped to [tau-1, tau+1]. Boundary lags return unchanged."""
    vals = c.values
    if tau <= 0 or tau >= len(vals) - 1:
        return float(tau)
    a, b, cc = vals[tau - 1], vals[tau], vals[tau + 1]
    denom = a - 2.0 * b + cc
    if denom == 0.0:
        return float(tau)
    vertex = tau + (a - cc) / (2.0 * denom)
    return float(min(max(vertex, tau - 1.0), tau + 1.0))


def _pick_lag(
    vals: np.ndarray, sample_rate: int, threshold: float, f_min: float, f_max: float
) -> tuple[int, float]:
    """Choose the period lag: first local minimum under the threshold inside
    [sr/f_max, sr/f_min], else the global minimum of that range.

    Returns (integer lag, aperiodicity = d' at that lag).
    """
    lo = max(1, int(np.floor(sample_rate / f_max)))
    hi = min(len(vals) - 2, int(np.ceil(sample_rate / f_min)))
    if lo > hi:
        raise ValueError(
            f"invalid f0 bounds: lag range [{lo}, {hi}] is empty for "
            f"f_min={f_min}, f_max={f_max} at {sample_rate} Hz"
        )
    tau = lo
    while tau <= hi:
        if vals[tau] < threshold:
            while tau + 1 <= hi and vals[tau + 1] < vals[tau]:
                tau += 1
            return tau, float(vals[tau])
        tau += 1
    tau = lo + int(np.argmin(vals[lo : hi + 1]))
    return tau, float(vals[tau])


def estimate_f0(
    c: CmndCurve,
    threshold: float = DEFAULT_THRESHOLD,
    f_min: float = DEFAULT_F_MIN,
    f_max: float = DEFAULT_F_MAX,
    voicing_cutoff: float = DEFAULT_VOICING_CUTOFF,
) -> tuple[float, float] | None:
    """Estimate (f0_hz, aperiodicity) from a CMND curve, or None if unvoiced.

    The chosen integer lag is refined parabolically; f0 = sr / lag, clamped
    into [f_min, f_max] (refinement can overshoot the search range by less
    than one lag). Aperiodicity is d' at the integer lag; values above
    voicing_cutoff report the frame as unvoiced.
    """
    if not (0.0 < f_min < f_max <= c.sample_rate / 2):
        raise ValueError(
            f"invalid f0 bounds: need 0 < f_min < f_max <= sr/2, got "
            f"[{f_min}, {f_max}] at {c.sample_rate} Hz"
        )
    tau, aperiodicity = _pick_lag(c.values, c.sample_rate, threshold, f_min, f_max)
    if aperiodicity > voicing_cutoff:
        return None
    lag = parabolic_refine(c, tau)
    f0 = c.sample_rate / lag
    return float(min(max(f0, f_min), f_max)), aperiodicity
