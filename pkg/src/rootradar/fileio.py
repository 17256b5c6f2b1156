"""
On-disk formats.

* B-scan CSV: a ``# dt_s=<v> n_traces=<v> n_samples=<v> [t0_index=<v>]``
  header line, then one row per time sample and one column per trace.
  Values are written in shortest round-trip form, so a save/load cycle is
  bit-exact.
* Surface CSV: two columns ``x_m, y_m``; a non-numeric first line is taken
  as a header.
* Pattern CSV: ``x_a_m, y_a_m, t_a_s`` per pick, preceded by a
  ``# time_window_s=<v>`` line.
* Results and session files: JSON.
* Heatmaps: binary PGM (P5), plus an optional text polyline overlay.

Every writer goes through :func:`atomic_write`, so an interrupted run never
leaves a truncated file behind.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import re
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence

import numpy as np

from .forward import AcquisitionConfig, MediumParams, TargetParams
from .geometry import (AntennaTrack, SurfaceProfile, System, arc_length_map,
                       build_ahf_track, build_surface, build_wb_track)
from .inversion import PsoConfig, RootEstimate, SearchBounds
from .radargram import Radargram
from .roi import ExtractedPattern

__all__ = [
    "InputError",
    "atomic_write",
    "save_bscan",
    "load_bscan",
    "load_surface",
    "save_surface",
    "save_pattern",
    "load_pattern",
    "save_results",
    "load_results",
    "PreprocessParams",
    "RoiParams",
    "PsoParams",
    "SessionConfig",
    "load_session",
    "save_session",
    "session_track",
    "search_bounds",
    "SynthParams",
    "render_heatmap",
    "write_overlay",
]


class InputError(ValueError):
    """A user-supplied file or setting is missing or malformed."""


def atomic_write(path, data: str | bytes) -> None:
    """Write ``data`` to a temporary file next to ``path``, then rename it over."""
    path = Path(path)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": ""})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _read_lines(path) -> List[str]:
    path = Path(path)
    try:
        return path.read_text(encoding="utf-8").splitlines()
    except FileNotFoundError:
        raise InputError(f"{path}: file not found") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: cannot read ({exc})") from None


def _parse_row(path, lineno: int, line: str, width: Optional[int] = None) -> np.ndarray:
    fields = line.split(",")
    if width is not None and len(fields) != width:
        raise InputError(f"{path}:{lineno}: expected {width} values, found {len(fields)}")
    try:
        return np.array([float(f) for f in fields])
    except ValueError:
        for k, f in enumerate(fields, 1):
            try:
                float(f)
            except ValueError:
                raise InputError(f"{path}:{lineno}: field {k} is not a number: {f.strip()!r}") from None
        raise


# -- B-scans -----------------------------------------------------------------

_HEADER_KEYS = {"dt_s": float, "n_traces": int, "n_samples": int, "t0_index": int}


def _fmt_rows(a: np.ndarray) -> str:
    return "".join(",".join(repr(float(v)) for v in row) + "\n" for row in a)


def save_bscan(r: Radargram, path) -> None:
    header = (f"# dt_s={r.sample_interval!r} n_traces={r.n_traces} "
              f"n_samples={r.n_samples} t0_index={r.time_zero_index}\n")
    atomic_write(path, header + _fmt_rows(r.samples))


def load_bscan(path, track: Optional[AntennaTrack] = None) -> Radargram:
    lines = _read_lines(path)
    if not lines or not lines[0].startswith("#"):
        raise InputError(f"{path}:1: missing '# dt_s=... n_traces=... n_samples=...' header")
    meta = {}
    for tok in lines[0][1:].split():
        key, sep, val = tok.partition("=")
        if not sep or key not in _HEADER_KEYS:
            raise InputError(f"{path}:1: unexpected header field {tok!r}")
        try:
            meta[key] = _HEADER_KEYS[key](val)
        except ValueError:
            raise InputError(f"{path}:1: header field {key} has bad value {val!r}") from None
    for key in ("dt_s", "n_traces", "n_samples"):
        if key not in meta:
            raise InputError(f"{path}:1: header lacks {key}")
    body = [(k, ln) for k, ln in enumerate(lines[1:], 2) if ln.strip()]
    if len(body) != meta["n_samples"]:
        raise InputError(f"{path}: header says n_samples={meta['n_samples']}, "
                         f"file has {len(body)} rows")
    data = np.empty((meta["n_samples"], meta["n_traces"]))
    for i, (k, ln) in enumerate(body):
        n_fields = ln.count(",") + 1
        if n_fields != meta["n_traces"]:
            raise InputError(f"{path}:{k}: header says n_traces={meta['n_traces']}, "
                             f"row has {n_fields} columns")
        data[i] = _parse_row(path, k, ln)
    try:
        return Radargram(data, meta["dt_s"], track, meta.get("t0_index", 0))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


# -- surfaces and patterns ---------------------------------------------------

def load_surface(path, resolution: float = 0.001) -> SurfaceProfile:
    """Read a two-column ``x_m, y_m`` profile and densify it."""
    lines = _read_lines(path)
    rows = []
    for k, ln in enumerate(lines, 1):
        if not ln.strip() or ln.lstrip().startswith("#"):
            continue
        if not rows and k == 1 and re.search(r"[A-Za-z]", ln) and not _is_numeric(ln):
            continue
        rows.append(_parse_row(path, k, ln, 2))
    if len(rows) < 2:
        raise InputError(f"{path}: a surface needs at least two points")
    try:
        return build_surface(np.array(rows), resolution)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def _is_numeric(line: str) -> bool:
    try:
        [float(f) for f in line.split(",")]
        return True
    except ValueError:
        return False


def save_surface(points, path) -> None:
    atomic_write(path, "x_m,y_m\n" + _fmt_rows(np.asarray(points, dtype=float)))


def save_pattern(p: ExtractedPattern, path) -> None:
    atomic_write(path, f"# time_window_s={float(p.time_window)!r}\nx_a_m,y_a_m,t_a_s\n"
                 + _fmt_rows(p.observations))


def load_pattern(path) -> ExtractedPattern:
    lines = _read_lines(path)
    window = math.nan
    obs = []
    for k, ln in enumerate(lines, 1):
        s = ln.strip()
        if not s:
            continue
        if s.startswith("#"):
            m = re.match(r"#\s*time_window_s=(\S+)", s)
            if m:
                try:
                    window = float(m.group(1))
                except ValueError:
                    raise InputError(f"{path}:{k}: bad time_window_s {m.group(1)!r}") from None
            continue
        if s.replace(" ", "") == "x_a_m,y_a_m,t_a_s":
            continue
        obs.append(_parse_row(path, k, s, 3))
    if not obs:
        raise InputError(f"{path}: no observations")
    obs = np.array(obs)
    if not math.isfinite(window):
        # without a record length, size the penalty from the latest pick
        window = float(2 * obs[:, 2].max())
    return ExtractedPattern(obs, window)


# -- results -----------------------------------------------------------------

def _estimate_dict(e: Optional[RootEstimate], source: str) -> dict:
    if e is None:
        return {"pattern": source, "x_c_m": None, "y_c_m": None, "r_m": None,
                "final_cost_s2": None, "iterations": None, "wall_time_s": None}
    return {"pattern": source, "x_c_m": e.x_c, "y_c_m": e.y_c, "r_m": e.R,
            "final_cost_s2": e.final_cost, "iterations": e.iterations,
            "wall_time_s": e.wall_time}


def save_results(estimates: Sequence[Optional[RootEstimate]], path, system: System | str,
                 sources: Optional[Sequence[str]] = None) -> None:
    sources = list(sources) if sources is not None else [f"pattern_{k:03d}" for k in range(len(estimates))]
    doc = {"system": System(system).value,
           "estimates": [_estimate_dict(e, s) for e, s in zip(estimates, sources)]}
    atomic_write(path, json.dumps(doc, indent=2) + "\n")


def load_results(path) -> List[dict]:
    """Estimate records in file order; failed inversions have ``None`` fields."""
    try:
        doc = json.loads("\n".join(_read_lines(path)))
        return list(doc["estimates"])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"{path}: malformed results file ({exc})") from None


# -- sessions ----------------------------------------------------------------

@dataclass
class PreprocessParams:
    threshold_frac: float = 0.05
    f_low_hz: float = 0.4e9
    f_high_hz: float = 3.4e9
    taper: float = 0.1
    gain_alpha: float = 1.0
    k_dominant: Optional[int] = None  # None: 3 for WB, 6 for AHF
    k_noise: int = 0


@dataclass
class RoiParams:
    amp_frac: float = 0.3
    min_segment: int = 2
    min_shared: int = 1
    min_region_pixels: int = 50
    envelope: bool = True
    wavelet_delay_s: float = 0.0


@dataclass
class PsoParams:
    n_particles: int = 100
    phi0: float = 0.5
    phi1: float = -1.5
    phi2: float = -1.0
    max_iters: int = 500
    tol: float = 1e-22
    stall_iters: int = 20
    seed: Optional[int] = 0
    x_range_m: Optional[List[float]] = None
    y_range_m: Optional[List[float]] = None
    r_range_m: List[float] = field(default_factory=lambda: [0.005, 0.30])

    def config(self, seed: Optional[int] = None) -> PsoConfig:
        return PsoConfig(self.n_particles, self.phi0, self.phi1, self.phi2, self.max_iters,
                         self.tol, self.stall_iters, self.seed if seed is None else seed)


@dataclass
class SynthParams:
    wavelet_center_freq_hz: float = 1.0e9
    noise_sigma: float = 0.0
    coupling_time_s: float = 1.0e-9
    coupling_amp: float = 5.0
    target_amp: float = 1.0
    beam_power: float = 6.0


@dataclass
class SessionConfig:
    """Everything a pipeline stage needs besides its input files.

    ``track_start_m`` / ``track_end_m`` are arc lengths for WB and x
    coordinates for AHF. A missing end means "as far as the surface goes".
    Paths are stored as given and resolved against ``base_dir``.
    """

    system: System
    eps: float
    surface_csv: str
    h0_m: float = 0.0
    sample_interval_s: float = 0.025e-9
    n_samples: int = 1024
    scan_step_m: float = 0.02
    track_start_m: float = 0.0
    track_end_m: Optional[float] = None
    bscan_csv: Optional[str] = None
    targets: List[List[float]] = field(default_factory=list)
    synth: SynthParams = field(default_factory=SynthParams)
    preprocess: PreprocessParams = field(default_factory=PreprocessParams)
    roi: RoiParams = field(default_factory=RoiParams)
    pso: PsoParams = field(default_factory=PsoParams)
    base_dir: Path = field(default=Path("."), repr=False, compare=False)

    def resolve(self, p: str) -> Path:
        p = Path(p)
        return p if p.is_absolute() else self.base_dir / p

    @property
    def medium(self) -> MediumParams:
        return MediumParams(self.eps)

    @property
    def target_params(self) -> List[TargetParams]:
        return [TargetParams(*t) for t in self.targets]

    def acquisition(self) -> AcquisitionConfig:
        s = self.synth
        return AcquisitionConfig(self.sample_interval_s, self.n_samples, s.wavelet_center_freq_hz,
                                 s.noise_sigma, s.coupling_time_s, s.coupling_amp,
                                 s.target_amp, s.beam_power)

    def surface(self) -> SurfaceProfile:
        return load_surface(self.resolve(self.surface_csv))

    def k_dominant(self) -> int:
        k = self.preprocess.k_dominant
        return k if k is not None else (3 if self.system is System.WB else 6)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("base_dir")
        d["system"] = self.system.value
        d["preprocess"]["k_dominant"] = self.k_dominant()
        return d


_BLOCKS = {"synth": SynthParams, "preprocess": PreprocessParams, "roi": RoiParams, "pso": PsoParams}


def _build(cls, data: dict, where: str):
    if not isinstance(data, dict):
        raise InputError(f"{where}: expected an object")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise InputError(f"{where}: unknown field(s) {', '.join(unknown)}")
    try:
        return cls(**data)
    except TypeError as exc:
        raise InputError(f"{where}: {exc}") from None


def load_session(path) -> SessionConfig:
    """Parse and validate a session file; relative paths are taken from its folder."""
    path = Path(path)
    text = "\n".join(_read_lines(path))
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(raw, dict):
        raise InputError(f"{path}: top level must be an object")
    raw = dict(raw)
    blocks = {k: _build(cls, raw.pop(k, {}), f"{path}: {k}") for k, cls in _BLOCKS.items()}
    for req in ("system", "eps", "surface_csv"):
        if req not in raw:
            raise InputError(f"{path}: missing field {req!r}")
    try:
        raw["system"] = System(str(raw["system"]).upper())
    except ValueError:
        raise InputError(f"{path}: field 'system' must be WB or AHF, got {raw['system']!r}") from None
    cfg = _build(SessionConfig, {**raw, **blocks}, str(path))
    cfg.base_dir = path.parent

    _check_session(cfg, path)
    surf = cfg.resolve(cfg.surface_csv)
    if not surf.is_file():
        raise InputError(f"{path}: surface_csv not found: {surf}")
    return cfg


def _check_session(cfg: SessionConfig, path) -> None:
    def need(cond, msg):
        if not cond:
            raise InputError(f"{path}: {msg}")

    need(isinstance(cfg.eps, (int, float)) and cfg.eps >= 1, "field 'eps' must be >= 1")
    need(cfg.sample_interval_s > 0, "field 'sample_interval_s' must be positive")
    need(isinstance(cfg.n_samples, int) and cfg.n_samples >= 2, "field 'n_samples' must be an integer >= 2")
    need(cfg.scan_step_m > 0, "field 'scan_step_m' must be positive")
    for k, t in enumerate(cfg.targets):
        need(isinstance(t, (list, tuple)) and len(t) == 3, f"targets[{k}] must be [x_c_m, y_c_m, r_m]")
        need(t[2] > 0, f"targets[{k}]: radius must be positive")
    k = cfg.k_dominant()
    need(isinstance(k, int) and k >= 0, "preprocess.k_dominant must be a non-negative integer")
    need(0 < cfg.roi.amp_frac < 1, "roi.amp_frac must be in (0, 1)")


def save_session(cfg: SessionConfig, path) -> None:
    """Write the session with every default spelled out."""
    atomic_write(path, json.dumps(cfg.to_dict(), indent=2) + "\n")


def session_track(cfg: SessionConfig, profile: SurfaceProfile,
                  n_traces: Optional[int] = None) -> AntennaTrack:
    """Antenna positions described by the session.

    With ``n_traces`` given and no explicit end, the track is cut to exactly
    that many positions; with an explicit end the count must match.
    """
    step, start = cfg.scan_step_m, cfg.track_start_m
    end = cfg.track_end_m
    if end is None and n_traces is not None:
        end = start + (n_traces - 1) * step
    try:
        if cfg.system is System.WB:
            track = build_wb_track(arc_length_map(profile), step, start, end)
        else:
            track = build_ahf_track(start, profile.extent[1] if end is None else end, step)
    except ValueError as exc:
        raise InputError(f"antenna track: {exc}") from None
    if n_traces is not None and len(track) != n_traces:
        raise InputError(f"session describes {len(track)} antenna positions, "
                         f"B-scan has {n_traces} traces")
    return track


def search_bounds(cfg: SessionConfig, profile: SurfaceProfile, track: AntennaTrack,
                  time_window: float) -> SearchBounds:
    from .inversion import default_bounds

    p = cfg.pso
    b = default_bounds(profile, cfg.medium, time_window,
                       (float(track.xa.min()), float(track.xa.max())), tuple(p.r_range_m))
    return SearchBounds(tuple(p.x_range_m) if p.x_range_m else b.x_range,
                        tuple(p.y_range_m) if p.y_range_m else b.y_range,
                        b.r_range)


# -- images ------------------------------------------------------------------

def heatmap_pixels(r: Radargram) -> np.ndarray:
    """Amplitudes mapped linearly to 0..255 with zero at 128."""
    a = r.samples
    peak = np.abs(a).max()
    if peak == 0:
        return np.full(a.shape, 128, dtype=np.uint8)
    return np.clip(np.rint(128 + 127 * a / peak), 0, 255).astype(np.uint8)


def render_heatmap(r: Radargram, path) -> None:
    """Binary PGM of the B-scan: one row per time sample, one column per trace."""
    if r.samples.size == 0:
        raise ValueError("empty radargram")
    px = heatmap_pixels(r)
    header = f"P5\n{px.shape[1]} {px.shape[0]}\n255\n".encode("ascii")
    try:
        atomic_write(path, header + px.tobytes())
    except OSError as exc:
        raise OSError(f"cannot write heatmap to {path}: {exc}") from exc


def write_overlay(patterns: Iterable[ExtractedPattern], r: Radargram, path) -> None:
    """Polylines of the picks in pixel coordinates, one blank-line separated block each.

    Each line is ``column row``; rows count time samples as in the heatmap.
    """
    if r.track is None:
        raise ValueError("overlay needs the radargram's antenna track")
    blocks = []
    for k, p in enumerate(patterns):
        lines = [f"# pattern {k}"]
        for x, y, t in p.observations:
            col = int(np.argmin(np.hypot(r.track.xa - x, r.track.ya - y)))
            row = t / r.sample_interval + r.time_zero_index
            lines.append(f"{col} {row:.3f}")
        blocks.append("\n".join(lines))
    atomic_write(path, "\n\n".join(blocks) + "\n")
