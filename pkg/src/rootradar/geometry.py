"""
Scene geometry for surveys over undulating ground.

The scene is a vertical 2-D slice. ``x`` runs along the scan line and ``y``
is the vertical distance measured *downward* from the reference height H0,
so every subsurface depth is positive. The AHF start position is the origin.

A wheel-based (WB) system only records the distance it has rolled along the
ground. :func:`arc_length_map` and :func:`locate_wb_antenna` turn that
distance back into scene coordinates.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.interpolate import CubicSpline

__all__ = [
    "Point",
    "SurfaceProfile",
    "ArcLengthMap",
    "AntennaTrack",
    "System",
    "build_surface",
    "arc_length_map",
    "locate_wb_antenna",
    "build_wb_track",
    "build_ahf_track",
    "surface_intersection",
    "first_crossing",
]

DEFAULT_RESOLUTION = 0.001
DEFAULT_MAP_SAMPLES = 10_000
_CHUNK_ELEMS = 1 << 18


class Point(NamedTuple):
    x: float
    y: float


class System(str, enum.Enum):
    """Acquisition system."""

    WB = "WB"
    AHF = "AHF"


@dataclass(frozen=True, eq=False)
class SurfaceProfile:
    """Densified air-soil interface.

    ``knots`` keeps the raw recorded points. Between knots the surface is
    linear, so ray intersections are computed against the knots only; the
    dense ``x``/``y`` arrays are what the arc-length fit consumes.
    """

    x: np.ndarray
    y: np.ndarray
    resolution: float
    knots: np.ndarray

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    @property
    def extent(self) -> tuple[float, float]:
        return float(self.x[0]), float(self.x[-1])

    def height_at(self, x):
        """Surface depth below H0 at abscissa ``x`` (linear interpolation)."""
        return np.interp(x, self.knots[:, 0], self.knots[:, 1])


@dataclass(frozen=True, eq=False)
class ArcLengthMap:
    """Tabulated arc length ``s(u)`` of the spline curve ``S(u) = (x(u), y(u))``."""

    u: np.ndarray
    s: np.ndarray
    x: np.ndarray
    y: np.ndarray
    total_length: float
    _spline: CubicSpline = field(repr=False)

    @property
    def samples(self) -> np.ndarray:
        return np.column_stack([self.u, self.s, self.x, self.y])

    def evaluate(self, u) -> np.ndarray:
        return self._spline(u)


@dataclass(frozen=True, eq=False)
class AntennaTrack:
    """Antenna positions, one per A-scan.

    ``along`` is the survey coordinate: traveled distance for WB, horizontal
    position for AHF.
    """

    system: System
    positions: np.ndarray
    scan_step: float
    along: np.ndarray

    def __len__(self) -> int:
        return len(self.positions)

    @property
    def xa(self) -> np.ndarray:
        return self.positions[:, 0]

    @property
    def ya(self) -> np.ndarray:
        return self.positions[:, 1]


def build_surface(raw_points, resolution: float = DEFAULT_RESOLUTION) -> SurfaceProfile:
    """Densify recorded surface points by linear interpolation.

    Each raw segment is split into ``ceil(dx / resolution)`` equal pieces,
    so raw points are reproduced exactly and the spacing never exceeds
    ``resolution``.
    """
    pts = np.asarray(raw_points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise ValueError("need at least two (x, y) surface points")
    if not resolution > 0:
        raise ValueError("resolution must be positive")
    if not np.all(np.isfinite(pts)):
        raise ValueError("surface points must be finite")
    dx = np.diff(pts[:, 0])
    if np.any(dx <= 0):
        bad = int(np.argmin(dx > 0)) + 1
        raise ValueError(f"surface x must be strictly increasing (point {bad})")
    if np.any(pts[:, 1] < 0):
        raise ValueError("surface y must be >= 0 (the surface lies at or below H0)")
    if pts[0, 0] != 0.0:
        raise ValueError("surface must start at x = 0 (the scene origin)")

    xs, ys = [], []
    for (x0, y0), (x1, y1) in zip(pts[:-1], pts[1:]):
        n = max(1, math.ceil((x1 - x0) / resolution - 1e-9))
        w = np.arange(n) / n
        xs.append(x0 + w * (x1 - x0))
        ys.append(y0 + w * (y1 - y0))
    xs.append(pts[-1:, 0])
    ys.append(pts[-1:, 1])
    return SurfaceProfile(np.concatenate(xs), np.concatenate(ys), float(resolution), pts.copy())


def arc_length_map(profile: SurfaceProfile, n_samples: int = DEFAULT_MAP_SAMPLES) -> ArcLengthMap:
    """Arc length of the surface curve, tabulated on ``n_samples`` values of u.

    A cubic spline is fitted through the densified points with a normalized
    chord-length parameter ``u`` in [0, 1]; the arc-length integral is then
    approximated by summing chord lengths between consecutive samples.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    pts = profile.points
    chord = np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))
    knots_u = np.concatenate([[0.0], np.cumsum(chord)])
    knots_u /= knots_u[-1]
    spline = CubicSpline(knots_u, pts, axis=0)

    u = np.linspace(0.0, 1.0, n_samples)
    xy = spline(u)
    steps = np.hypot(np.diff(xy[:, 0]), np.diff(xy[:, 1]))
    s = np.concatenate([[0.0], np.cumsum(steps)])
    return ArcLengthMap(u, s, xy[:, 0], xy[:, 1], float(s[-1]), spline)


def locate_wb_antenna(amap: ArcLengthMap, s: float) -> Point:
    """Scene coordinates of the point reached after rolling ``s`` meters."""
    x, y = _locate(amap, np.asarray([s], dtype=float))[0]
    return Point(float(x), float(y))


def _locate(amap: ArcLengthMap, s: np.ndarray) -> np.ndarray:
    tol = 1e-9 * max(1.0, amap.total_length)
    if np.any(s < -tol) or np.any(s > amap.total_length + tol):
        raise ValueError(
            f"traveled distance outside [0, {amap.total_length:.6g}] m"
        )
    u = np.interp(s, amap.s, amap.u)
    return amap.evaluate(u)


def _count(start: float, end: float, step: float) -> int:
    return int(math.floor((end - start) / step + 1e-9)) + 1


def build_wb_track(
    amap: ArcLengthMap,
    step: float,
    s_start: float = 0.0,
    s_end: Optional[float] = None,
) -> AntennaTrack:
    """A-scan positions every ``step`` meters of rolled distance."""
    if not step > 0:
        raise ValueError("step must be positive")
    if s_end is None:
        s_end = amap.total_length
    if s_start < 0 or s_end > amap.total_length + 1e-9 or s_end < s_start:
        raise ValueError("WB track range outside the surface")
    n = _count(s_start, s_end, step)
    if n < 1:
        raise ValueError("empty track")
    s = s_start + step * np.arange(n)
    s = np.minimum(s, amap.total_length)
    return AntennaTrack(System.WB, _locate(amap, s), float(step), s)


def build_ahf_track(x_start: float, x_end: float, step: float) -> AntennaTrack:
    """A-scan positions at height H0 (``y = 0``) every ``step`` meters in x."""
    if not step > 0:
        raise ValueError("step must be positive")
    if x_end < x_start:
        raise ValueError("empty track")
    n = _count(x_start, x_end, step)
    x = x_start + step * np.arange(n)
    pos = np.column_stack([x, np.zeros(n)])
    return AntennaTrack(System.AHF, pos, float(step), x)


def first_crossing(knots: np.ndarray, ax, ay, cx, cy):
    """First point where the segments ``a -> c`` enter the soil.

    Vectorized over rays: every argument after ``knots`` broadcasts to a
    common shape. Returns ``(xg, yg)`` arrays of that shape, NaN where the
    segment never reaches the surface.
    """
    ax, ay, cx, cy = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (ax, ay, cx, cy))
    )
    shape = ax.shape
    ax, ay, cx, cy = (v.ravel() for v in (ax, ay, cx, cy))
    xg = np.empty(ax.size)
    yg = np.empty(ax.size)
    # bound the rays x segments work arrays to a few MB
    step = max(1, _CHUNK_ELEMS // max(1, len(knots) - 1))
    for a in range(0, ax.size, step):
        sl = slice(a, a + step)
        xg[sl], yg[sl] = _first_crossing_flat(knots, ax[sl], ay[sl], cx[sl], cy[sl])
    return xg.reshape(shape), yg.reshape(shape)


def _first_crossing_flat(knots, ax, ay, cx, cy):
    ax, ay, cx, cy = (v[:, None] for v in (ax, ay, cx, cy))

    qx, qy = knots[:-1, 0], knots[:-1, 1]
    ex, ey = np.diff(knots[:, 0]), np.diff(knots[:, 1])
    dx, dy = cx - ax, cy - ay

    denom = dx * ey - dy * ex
    wx, wy = qx - ax, qy - ay
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (wx * ey - wy * ex) / denom
        w = (wx * dy - wy * dx) / denom
    eps = 1e-12
    hit = (t >= -eps) & (t <= 1 + eps) & (w >= -eps) & (w <= 1 + eps)
    t = np.where(hit, t, np.inf)
    tmin = t.min(axis=1)
    # A ray starting exactly on the surface enters the soil immediately.
    h0 = ay[:, 0] - np.interp(ax[:, 0], knots[:, 0], knots[:, 1])
    inside = (ax[:, 0] >= knots[0, 0]) & (ax[:, 0] <= knots[-1, 0])
    tmin = np.where(inside & (np.abs(h0) <= eps) & (cy[:, 0] >= ay[:, 0]), 0.0, tmin)

    ok = np.isfinite(tmin)
    tmin = np.clip(np.where(ok, tmin, np.nan), 0.0, 1.0)
    xg = ax[:, 0] + tmin * dx[:, 0]
    yg = ay[:, 0] + tmin * dy[:, 0]
    return xg, yg


def surface_intersection(profile: SurfaceProfile, antenna, center) -> Optional[Point]:
    """Where the straight antenna-to-center ray first meets the ground.

    Returns ``None`` when the ray never reaches the surface (the candidate
    center sits above the ground along the whole segment).
    """
    ax, ay = antenna
    cx, cy = center
    if cy < 0 or cy < profile.height_at(cx):
        return None
    xg, yg = first_crossing(profile.knots, ax, ay, cx, cy)
    if np.isnan(xg):
        return None
    return Point(float(xg), float(yg))
