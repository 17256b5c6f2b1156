"""
Two-way travel-time models and a synthetic B-scan generator.

Both models treat the target as a circle (the cross-section of a root) and
the ray paths as straight lines. The WB antenna sits on the ground, so the
whole path is in soil. The AHF antenna rides at H0; its path is split at the
point where the straight antenna-to-center line meets the surface.

Infeasible geometries (antenna inside the target, ray that never reaches the
ground, target above the surface) evaluate to NaN instead of raising, so a
whole swarm of candidates can be evaluated in one call.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .geometry import AntennaTrack, SurfaceProfile, System, first_crossing
from .radargram import Radargram

__all__ = [
    "C0",
    "TargetParams",
    "MediumParams",
    "AcquisitionConfig",
    "wb_times",
    "ahf_times",
    "travel_time_wb",
    "travel_time_ahf",
    "depth_resolution",
    "ricker",
    "synthesize_bscan",
]

log = logging.getLogger(__name__)

#: Speed of light used throughout (the rounded value keeps hand-checked
#: travel times exact).
C0 = 3.0e8


@dataclass(frozen=True)
class TargetParams:
    x_c: float
    y_c: float
    R: float

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError("target radius must be positive")

    def as_array(self) -> np.ndarray:
        return np.array([self.x_c, self.y_c, self.R])


@dataclass(frozen=True)
class MediumParams:
    eps: float
    c0: float = C0

    def __post_init__(self):
        if not self.eps >= 1:
            raise ValueError("relative permittivity must be >= 1")

    @property
    def velocity(self) -> float:
        return self.c0 / math.sqrt(self.eps)


@dataclass(frozen=True)
class AcquisitionConfig:
    """Knobs of the synthetic B-scan generator.

    ``coupling_time`` is the onset of the direct-coupling wavelet and defines
    time zero. ``beam_power`` is the exponent of a ``cos(theta)**p`` antenna
    footprint, theta being the off-vertical angle of the antenna-to-target
    line; it keeps hyperbola tails from running across the whole section.
    """

    sample_interval: float = 0.025e-9
    n_samples: int = 1024
    wavelet_center_freq: float = 1.0e9
    noise_sigma: float = 0.0
    coupling_time: float = 1.0e-9
    coupling_amp: float = 5.0
    target_amp: float = 1.0
    beam_power: float = 6.0

    def __post_init__(self):
        if not self.sample_interval > 0:
            raise ValueError("sample_interval must be positive")
        if self.n_samples < 2:
            raise ValueError("n_samples must be >= 2")


def wb_times(xa, ya, xc, yc, r, eps, c0=C0):
    """Vectorized WB travel time; broadcasts over all arguments."""
    d = np.hypot(np.subtract(xa, xc), np.subtract(ya, yc))
    t = (d - r) * (2.0 * np.sqrt(eps) / c0)
    return np.where(d >= r, t, np.nan)


def ahf_times(knots, xa, ya, xc, yc, r, eps, c0=C0):
    """Vectorized AHF travel time (air leg + soil leg).

    ``knots`` are the raw surface points; the surface is linear between them.
    """
    xa, ya, xc, yc, r = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (xa, ya, xc, yc, r))
    )
    xg, yg = first_crossing(knots, xa, ya, xc, yc)
    air = np.hypot(xa - xg, ya - yg)
    soil = np.hypot(xg - xc, yg - yc)
    t = 2.0 * air / c0 + (soil - r) * (2.0 * np.sqrt(eps) / c0)
    below = (yc >= 0) & (yc >= np.interp(xc, knots[:, 0], knots[:, 1]))
    ok = below & (soil >= r)
    with np.errstate(invalid="ignore"):
        return np.where(ok, t, np.nan)


def travel_time_wb(antenna, target: TargetParams, medium: MediumParams) -> float:
    """Two-way time from a ground-coupled antenna to the target surface.

    NaN when the antenna lies inside the target.
    """
    return float(wb_times(antenna[0], antenna[1], target.x_c, target.y_c,
                          target.R, medium.eps, medium.c0))


def travel_time_ahf(profile: SurfaceProfile, antenna, target: TargetParams,
                    medium: MediumParams) -> float:
    """Two-way time from an antenna at H0 through air, then soil, to the target.

    NaN when the straight ray does not reach the ground or the target
    breaks the surface.
    """
    return float(ahf_times(profile.knots, antenna[0], antenna[1], target.x_c,
                           target.y_c, target.R, medium.eps, medium.c0))


def depth_resolution(bandwidth: float, eps: float, c0: float = C0) -> float:
    """Vertical resolution ``c0 / (2 * BW * sqrt(eps))`` in meters."""
    if not bandwidth > 0:
        raise ValueError("bandwidth must be positive")
    if not eps >= 1:
        raise ValueError("eps must be >= 1")
    return c0 / (2.0 * bandwidth * math.sqrt(eps))


def ricker(t, f):
    """Ricker wavelet with peak frequency ``f``, unit peak at ``t = 0``."""
    a = (np.pi * f * np.asarray(t)) ** 2
    return (1.0 - 2.0 * a) * np.exp(-a)


@lru_cache(maxsize=None)
def _onset_lead(f: float, level: float = 0.1) -> float:
    # time before the peak at which the leading side lobe tail reaches `level`
    a = brentq(lambda a: (2 * a - 1) * math.exp(-a) - level, 1.5, 50.0)
    return math.sqrt(a) / (math.pi * f)


def _arrival_times(track, profile, target, medium):
    if track.system is System.WB:
        return wb_times(track.xa, track.ya, target.x_c, target.y_c, target.R,
                        medium.eps, medium.c0)
    return ahf_times(profile.knots, track.xa, track.ya, target.x_c, target.y_c,
                     target.R, medium.eps, medium.c0)


def synthesize_bscan(
    profile: SurfaceProfile,
    targets: Sequence[TargetParams],
    track: AntennaTrack,
    medium: MediumParams,
    acq: AcquisitionConfig = AcquisitionConfig(),
    rng: Optional[np.random.Generator | int] = None,
) -> Radargram:
    """Synthetic B-scan built from the forward models.

    Each target contributes a Ricker wavelet centered on its arrival time in
    every column, scaled by ``1 / max(t, dt)`` (unit amplitude at 1 ns) and
    by the antenna footprint. A column-invariant direct-coupling wavelet
    starts at ``acq.coupling_time``, which is also time zero. White Gaussian
    noise is added last.
    """
    dt = acq.sample_interval
    n = acq.n_samples
    f = acq.wavelet_center_freq
    t0_index = int(round(acq.coupling_time / dt))
    if not 0 <= t0_index < n:
        raise ValueError("coupling_time outside the time window")
    t = np.arange(n) * dt
    data = np.zeros((n, len(track)))

    for k, target in enumerate(targets):
        arrival = _arrival_times(track, profile, target, medium)
        center = t0_index * dt + arrival
        late = np.isfinite(arrival) & (center > t[-1])
        if np.any(late):
            log.warning("target %d arrives after the time window in %d columns",
                        k, int(late.sum()))
        use = np.isfinite(arrival) & ~late
        if not np.all(np.isfinite(arrival)):
            log.warning("target %d is infeasible from %d positions",
                        k, int((~np.isfinite(arrival)).sum()))
        theta = np.arctan2(np.abs(track.xa - target.x_c), np.abs(target.y_c - track.ya))
        amp = acq.target_amp * np.cos(theta) ** acq.beam_power
        amp = amp * 1e-9 / np.maximum(np.nan_to_num(arrival, nan=dt), dt)
        cols = np.flatnonzero(use)
        data[:, cols] += amp[cols] * ricker(t[:, None] - center[cols], f)

    if acq.coupling_amp:
        start = t0_index * dt
        w = ricker(t - start - _onset_lead(f), f)
        w[t < start - 0.5 * dt] = 0.0
        data += acq.coupling_amp * w[:, None]

    if acq.noise_sigma > 0:
        rng = np.random.default_rng(rng)
        data += rng.normal(0.0, acq.noise_sigma, data.shape)
    return Radargram(data, dt, track, t0_index)
