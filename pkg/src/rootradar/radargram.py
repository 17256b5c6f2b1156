from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .geometry import AntennaTrack

__all__ = ["Radargram"]


@dataclass(frozen=True, eq=False)
class Radargram:
    """B-scan matrix: rows are time samples, columns are A-scans.

    Operations never modify ``samples`` in place; they return new objects.
    """

    samples: np.ndarray
    sample_interval: float
    track: Optional[AntennaTrack] = None
    time_zero_index: int = 0

    def __post_init__(self):
        a = np.asarray(self.samples, dtype=float)
        if a.ndim != 2 or a.shape[0] < 2 or a.shape[1] < 1:
            raise ValueError(f"radargram must be (n_samples >= 2, n_traces >= 1), got {a.shape}")
        if not self.sample_interval > 0:
            raise ValueError("sample_interval must be positive")
        if not 0 <= self.time_zero_index < a.shape[0]:
            raise ValueError("time_zero_index outside the time window")
        if self.track is not None and len(self.track) != a.shape[1]:
            raise ValueError(
                f"track has {len(self.track)} positions for {a.shape[1]} traces"
            )
        object.__setattr__(self, "samples", a)

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def n_traces(self) -> int:
        return self.samples.shape[1]

    @property
    def time_window(self) -> float:
        return self.n_samples * self.sample_interval

    @property
    def times(self) -> np.ndarray:
        """Sample times relative to time zero, in seconds."""
        return (np.arange(self.n_samples) - self.time_zero_index) * self.sample_interval

    def with_samples(self, samples, **changes) -> "Radargram":
        return replace(self, samples=samples, **changes)
