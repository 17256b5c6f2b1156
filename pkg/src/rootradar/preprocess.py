"""
B-scan conditioning: time-zero alignment, band-pass, DC removal, gain and
SVD background removal.

Every function takes a :class:`Radargram` and returns a new one with the
same shape.
"""

from __future__ import annotations

import logging

import numpy as np

from .radargram import Radargram

__all__ = [
    "Radargram",
    "time_zero_correct",
    "bandpass",
    "dc_remove",
    "time_gain",
    "svd_background_removal",
    "bandpass_window",
]

log = logging.getLogger(__name__)


def time_zero_correct(r: Radargram, threshold_frac: float = 0.05) -> Radargram:
    """Shift all traces so the first break of the mean trace lands on sample 0.

    The first break is the first sample whose absolute mean-trace amplitude
    exceeds ``threshold_frac`` times the mean trace's peak. Vacated samples
    at the end are zero-filled.
    """
    if not 0 < threshold_frac < 1:
        raise ValueError("threshold_frac must be in (0, 1)")
    mean = np.abs(r.samples.mean(axis=1))
    peak = mean.max()
    if peak == 0:
        log.warning("all-zero mean trace; time-zero correction skipped")
        return r
    shift = int(np.argmax(mean > threshold_frac * peak))
    out = np.zeros_like(r.samples)
    out[: r.n_samples - shift] = r.samples[shift:]
    return r.with_samples(out, time_zero_index=0)


def bandpass_window(freqs: np.ndarray, f_low: float, f_high: float, taper: float = 0.1) -> np.ndarray:
    """Unit passband with raised-cosine skirts ``taper * (f_high - f_low)`` wide."""
    width = taper * (f_high - f_low)
    w = np.zeros_like(freqs, dtype=float)
    w[(freqs >= f_low) & (freqs <= f_high)] = 1.0
    if width > 0:
        lo = (freqs < f_low) & (freqs > f_low - width)
        w[lo] = 0.5 * (1 + np.cos(np.pi * (f_low - freqs[lo]) / width))
        hi = (freqs > f_high) & (freqs < f_high + width)
        w[hi] = 0.5 * (1 + np.cos(np.pi * (freqs[hi] - f_high) / width))
    return w


def bandpass(r: Radargram, f_low: float, f_high: float, taper: float = 0.1) -> Radargram:
    """Zero-phase band-pass applied per trace in the frequency domain."""
    nyquist = 0.5 / r.sample_interval
    if not 0 <= f_low < f_high:
        raise ValueError("need 0 <= f_low < f_high")
    if f_high >= nyquist:
        raise ValueError(f"f_high {f_high:g} Hz is not below Nyquist {nyquist:g} Hz")
    freqs = np.fft.rfftfreq(r.n_samples, r.sample_interval)
    spectrum = np.fft.rfft(r.samples, axis=0)
    spectrum *= bandpass_window(freqs, f_low, f_high, taper)[:, None]
    return r.with_samples(np.fft.irfft(spectrum, n=r.n_samples, axis=0))


def dc_remove(r: Radargram) -> Radargram:
    return r.with_samples(r.samples - r.samples.mean(axis=0, keepdims=True))


def time_gain(r: Radargram, alpha: float = 1.0) -> Radargram:
    """Multiply sample ``i`` by ``((i + 1) * dt) ** alpha``, unity at mid-window."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    i = np.arange(r.n_samples) + 1.0
    mid = (r.n_samples - 1) / 2 + 1.0
    g = (i / mid) ** alpha
    return r.with_samples(r.samples * g[:, None])


def svd_background_removal(r: Radargram, k_dominant: int = 3, k_noise: int = 0) -> Radargram:
    """Drop the ``k_dominant`` largest and ``k_noise`` smallest singular values.

    The leading components carry the column-invariant clutter (direct
    coupling, ground ringing); the trailing ones carry incoherent noise.
    """
    m = min(r.samples.shape)
    if k_dominant < 0 or k_noise < 0 or k_dominant + k_noise >= m:
        raise ValueError(
            f"k_dominant + k_noise must be in [0, {m - 1}], got {k_dominant} + {k_noise}"
        )
    u, s, vt = np.linalg.svd(r.samples, full_matrices=False)
    keep = s.copy()
    keep[:k_dominant] = 0.0
    if k_noise:
        keep[len(s) - k_noise:] = 0.0
    return r.with_samples((u * keep) @ vt)
