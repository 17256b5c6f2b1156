"""
Region-of-interest extraction by column-connection clustering (C3).

The binarized B-scan is scanned column by column. Vertical runs of lit
pixels are *segments*; segments in neighboring columns whose row ranges
overlap are chained into one *region*. Each surviving region is reduced to
one travel-time pick per column.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from scipy.signal import hilbert

from .geometry import AntennaTrack
from .radargram import Radargram

__all__ = [
    "Segment",
    "Region",
    "ExtractedPattern",
    "binarize",
    "column_runs",
    "c3_cluster",
    "pick_travel_times",
    "extract_patterns",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Segment:
    column: int
    row_start: int
    row_end: int  # inclusive

    @property
    def length(self) -> int:
        return self.row_end - self.row_start + 1


@dataclass(frozen=True)
class Region:
    segments: tuple

    @property
    def pixel_count(self) -> int:
        return sum(s.length for s in self.segments)

    @property
    def column_span(self) -> tuple[int, int]:
        return self.segments[0].column, self.segments[-1].column

    @property
    def columns(self) -> list[int]:
        return sorted({s.column for s in self.segments})

    def mask(self, shape) -> np.ndarray:
        m = np.zeros(shape, dtype=bool)
        for s in self.segments:
            m[s.row_start:s.row_end + 1, s.column] = True
        return m


@dataclass(frozen=True, eq=False)
class ExtractedPattern:
    """Travel-time observations ``(x_a, y_a, t_a)`` for one target.

    ``time_window`` is the record length the picks came from; the cost
    functions use it to size the penalty for infeasible candidates.
    """

    observations: np.ndarray
    time_window: float
    source_region: Optional[Region] = field(default=None, repr=False)

    def __post_init__(self):
        obs = np.asarray(self.observations, dtype=float).reshape(-1, 3)
        object.__setattr__(self, "observations", obs)

    def __len__(self) -> int:
        return len(self.observations)

    @property
    def xa(self) -> np.ndarray:
        return self.observations[:, 0]

    @property
    def ya(self) -> np.ndarray:
        return self.observations[:, 1]

    @property
    def ta(self) -> np.ndarray:
        return self.observations[:, 2]

    def with_times(self, ta) -> "ExtractedPattern":
        obs = self.observations.copy()
        obs[:, 2] = ta
        return ExtractedPattern(obs, self.time_window, self.source_region)


def binarize(r: Radargram, amp_frac: float = 0.3, envelope: bool = True) -> np.ndarray:
    """Pixels whose magnitude reaches ``amp_frac`` of the global peak.

    With ``envelope=True`` the magnitude is the trace envelope (modulus of
    the analytic signal), so a reflected wavelet lights one contiguous band
    instead of one band per lobe. ``envelope=False`` thresholds ``|amplitude|``.
    """
    if not 0 < amp_frac < 1:
        raise ValueError("amp_frac must be in (0, 1)")
    a = np.abs(hilbert(r.samples, axis=0)) if envelope else np.abs(r.samples)
    peak = a.max()
    if peak == 0:
        log.warning("all-zero radargram; mask is empty")
        return np.zeros(a.shape, dtype=bool)
    return a >= amp_frac * peak


def column_runs(col: np.ndarray) -> list[tuple[int, int]]:
    """Inclusive ``(start, end)`` rows of each run of True values."""
    padded = np.concatenate([[False], np.asarray(col, dtype=bool), [False]])
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    return [(int(a), int(b) - 1) for a, b in zip(edges[::2], edges[1::2])]


def c3_cluster(
    mask: np.ndarray,
    min_segment: int = 2,
    min_shared: int = 1,
    min_region_pixels: int = 50,
) -> List[Region]:
    """Cluster column segments into regions.

    Segments shorter than ``min_segment`` are dropped. Segments in adjacent
    columns sharing at least ``min_shared`` rows are merged (transitively).
    Regions below ``min_region_pixels`` are dropped. The result is sorted by
    first column, then first row.
    """
    if min(min_segment, min_shared, min_region_pixels) < 1:
        raise ValueError("C3 thresholds must be >= 1")
    mask = np.asarray(mask, dtype=bool)
    per_col = []
    for j in range(mask.shape[1]):
        per_col.append([Segment(j, a, b) for a, b in column_runs(mask[:, j])
                        if b - a + 1 >= min_segment])

    ds = DisjointSet(s for col in per_col for s in col)
    for left, right in zip(per_col[:-1], per_col[1:]):
        for s in left:
            for t in right:
                shared = min(s.row_end, t.row_end) - max(s.row_start, t.row_start) + 1
                if shared >= min_shared:
                    ds.merge(s, t)

    regions = [Region(tuple(sorted(group))) for group in ds.subsets()]
    regions = [g for g in regions if g.pixel_count >= min_region_pixels]
    regions.sort(key=lambda g: (g.column_span[0], g.segments[0].row_start))
    return regions


def pick_travel_times(
    region: Region,
    r: Radargram,
    track: Optional[AntennaTrack] = None,
    wavelet_delay: float = 0.0,
) -> ExtractedPattern:
    """One travel time per region column: the peak ``|amplitude|`` inside the region."""
    track = track if track is not None else r.track
    if track is None:
        raise ValueError("no antenna track to attach the picks to")
    cols = region.columns
    if cols and cols[-1] >= len(track):
        raise ValueError("region extends beyond the antenna track")
    rows_by_col: dict[int, list[int]] = {}
    for s in region.segments:
        rows_by_col.setdefault(s.column, []).extend(range(s.row_start, s.row_end + 1))
    obs = []
    for j in cols:
        rows = np.asarray(rows_by_col[j])
        if rows.size == 0:
            continue
        i = rows[np.argmax(np.abs(r.samples[rows, j]))]
        t = (i - r.time_zero_index) * r.sample_interval - wavelet_delay
        obs.append((track.positions[j, 0], track.positions[j, 1], t))
    return ExtractedPattern(np.array(obs), r.time_window, region)


def extract_patterns(
    r: Radargram,
    track: Optional[AntennaTrack] = None,
    amp_frac: float = 0.3,
    min_segment: int = 2,
    min_shared: int = 1,
    min_region_pixels: int = 50,
    wavelet_delay: float = 0.0,
    envelope: bool = True,
) -> List[ExtractedPattern]:
    """Binarize, cluster and pick in one call."""
    mask = binarize(r, amp_frac, envelope)
    regions = c3_cluster(mask, min_segment, min_shared, min_region_pixels)
    return [pick_travel_times(g, r, track, wavelet_delay) for g in regions]
