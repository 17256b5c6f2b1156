"""
Travel-time inversion for target center and radius.

The misfit between picked and modeled travel times is minimized with a
particle swarm. The velocity update is written with *negative* personal and
social coefficients acting on ``(q - best)``; with ``phi1, phi2 < 0`` this is
the usual attraction toward the bests with weights ``|phi1|`` and ``|phi2|``.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .forward import C0, MediumParams, TargetParams, ahf_times, wb_times
from .geometry import SurfaceProfile, System
from .roi import ExtractedPattern

__all__ = [
    "SearchBounds",
    "PsoConfig",
    "RootEstimate",
    "cost_wb",
    "cost_ahf",
    "batch_cost",
    "velocity_update",
    "pso_minimize",
    "default_bounds",
    "invert_pattern",
    "invert_all",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchBounds:
    x_range: tuple[float, float]
    y_range: tuple[float, float]
    r_range: tuple[float, float] = (0.005, 0.30)

    def __post_init__(self):
        for name in ("x_range", "y_range", "r_range"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ValueError(f"{name}: min must be < max")
        if not self.r_range[0] > 0:
            raise ValueError("r_range minimum must be positive")

    @property
    def lower(self) -> np.ndarray:
        return np.array([self.x_range[0], self.y_range[0], self.r_range[0]])

    @property
    def upper(self) -> np.ndarray:
        return np.array([self.x_range[1], self.y_range[1], self.r_range[1]])


@dataclass(frozen=True)
class PsoConfig:
    n_particles: int = 100
    phi0: float = 0.5
    phi1: float = -1.5
    phi2: float = -1.0
    max_iters: int = 500
    tol: float = 1e-22
    stall_iters: int = 20
    seed: Optional[int] = 0

    def __post_init__(self):
        if self.n_particles < 2:
            raise ValueError("n_particles must be >= 2")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class RootEstimate:
    x_c: float
    y_c: float
    R: float
    final_cost: float
    iterations: int
    evaluations: int
    wall_time: float = 0.0
    history: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)

    @property
    def target(self) -> TargetParams:
        return TargetParams(self.x_c, self.y_c, self.R)


def _penalty(pattern: ExtractedPattern) -> float:
    return (10.0 * pattern.time_window) ** 2


def batch_cost(
    pattern: ExtractedPattern,
    q: np.ndarray,
    medium: MediumParams,
    system: System | str = System.WB,
    profile: Optional[SurfaceProfile] = None,
) -> np.ndarray:
    """Sum of squared travel-time residuals for each row ``(x_c, y_c, R)`` of ``q``."""
    if len(pattern) == 0:
        raise ValueError("empty pattern")
    q = np.atleast_2d(np.asarray(q, dtype=float))
    xc, yc, r = (q[:, k:k + 1] for k in range(3))
    system = System(system)
    if system is System.WB:
        model = wb_times(pattern.xa, pattern.ya, xc, yc, r, medium.eps, medium.c0)
    else:
        if profile is None:
            raise ValueError("AHF cost needs the surface profile")
        model = ahf_times(profile.knots, pattern.xa, pattern.ya, xc, yc, r,
                          medium.eps, medium.c0)
    resid2 = (pattern.ta - model) ** 2
    resid2 = np.where(np.isnan(resid2), _penalty(pattern), resid2)
    return resid2.sum(axis=1)


def cost_wb(pattern: ExtractedPattern, candidate: TargetParams, medium: MediumParams) -> float:
    return float(batch_cost(pattern, candidate.as_array(), medium, System.WB)[0])


def cost_ahf(pattern: ExtractedPattern, profile: SurfaceProfile,
             candidate: TargetParams, medium: MediumParams) -> float:
    return float(batch_cost(pattern, candidate.as_array(), medium, System.AHF, profile)[0])


def velocity_update(v, q, q_best, q_global, v1, v2, phi0, phi1, phi2):
    """Swarm velocity step; ``v1``, ``v2`` are per-particle uniform draws."""
    v1 = np.asarray(v1)[..., None]
    v2 = np.asarray(v2)[..., None]
    return phi0 * v + phi1 * v1 * (q - q_best) + phi2 * v2 * (q - q_global)


def pso_minimize(
    cost: Callable,
    bounds: SearchBounds,
    cfg: PsoConfig = PsoConfig(),
    vectorized: bool = False,
) -> RootEstimate:
    """Minimize ``cost(x_c, y_c, R)`` over the box ``bounds``.

    With ``vectorized=True`` the callable receives an ``(N, 3)`` array and
    returns ``N`` costs; otherwise it is called once per particle with a
    length-3 array. Particles leaving the box are clamped to it and the
    offending velocity components zeroed. Stops after ``cfg.max_iters``
    iterations, or once the global best has improved by less than
    ``cfg.tol`` for ``cfg.stall_iters`` iterations in a row.
    """
    rng = np.random.default_rng(cfg.seed)
    lo, hi = bounds.lower, bounds.upper
    n = cfg.n_particles

    if vectorized:
        evaluate = lambda q: np.asarray(cost(q), dtype=float)
    else:
        evaluate = lambda q: np.array([cost(p) for p in q], dtype=float)

    t_start = time.perf_counter()
    q = lo + rng.uniform(size=(n, 3)) * (hi - lo)
    # zero initial velocities let the swarm collapse before it explores
    v = rng.uniform(-0.5, 0.5, size=(n, 3)) * (hi - lo)
    c = evaluate(q)
    evals = n
    q_best, c_best = q.copy(), c.copy()
    g = int(np.argmin(c_best))
    q_g, c_g = q_best[g].copy(), c_best[g]
    history = [c_g]

    stall = 0
    it = 0
    while it < cfg.max_iters:
        it += 1
        v1 = rng.uniform(size=n)
        v2 = rng.uniform(size=n)
        v = velocity_update(v, q, q_best, q_g, v1, v2, cfg.phi0, cfg.phi1, cfg.phi2)
        q = q + v
        out = (q < lo) | (q > hi)
        q = np.clip(q, lo, hi)
        v[out] = 0.0

        c = evaluate(q)
        evals += n
        better = c < c_best
        q_best[better] = q[better]
        c_best[better] = c[better]
        g = int(np.argmin(c_best))
        improvement = c_g - c_best[g]
        if c_best[g] < c_g:
            q_g, c_g = q_best[g].copy(), c_best[g]
        history.append(c_g)

        stall = stall + 1 if improvement < cfg.tol else 0
        if stall >= cfg.stall_iters:
            break

    return RootEstimate(
        float(q_g[0]), float(q_g[1]), float(q_g[2]), float(c_g), it, evals,
        time.perf_counter() - t_start, np.asarray(history),
    )


def default_bounds(
    profile: SurfaceProfile,
    medium: MediumParams,
    time_window: float,
    x_range: Optional[tuple[float, float]] = None,
    r_range: tuple[float, float] = (0.005, 0.30),
) -> SearchBounds:
    """Search box: the scanned stretch in x, from the deepest surface point
    down to the depth reachable within the time window.

    ``x_range`` should be the antenna track's x-extent; it falls back to the
    surface extent.
    """
    if x_range is None:
        x_range = profile.extent
    y_lo = float(profile.y.max())
    y_hi = medium.c0 * time_window / (2.0 * math.sqrt(medium.eps))
    return SearchBounds(tuple(map(float, x_range)), (y_lo, y_hi), tuple(r_range))


def invert_pattern(
    pattern: ExtractedPattern,
    profile: SurfaceProfile,
    medium: MediumParams,
    bounds: Optional[SearchBounds] = None,
    cfg: PsoConfig = PsoConfig(),
    system: System | str = System.WB,
) -> RootEstimate:
    system = System(system)
    if len(pattern) == 0:
        raise ValueError("empty pattern")
    if bounds is None:
        bounds = default_bounds(profile, medium, pattern.time_window)
    prof = profile if system is System.AHF else None
    return pso_minimize(lambda q: batch_cost(pattern, q, medium, system, prof),
                        bounds, cfg, vectorized=True)


def invert_all(
    patterns: Sequence[ExtractedPattern],
    profile: SurfaceProfile,
    medium: MediumParams,
    bounds: Optional[SearchBounds] = None,
    cfg: PsoConfig = PsoConfig(),
    system: System | str = System.WB,
) -> List[Optional[RootEstimate]]:
    """One independent inversion per pattern, in input order.

    A pattern whose inversion fails yields ``None`` and a logged error; the
    remaining patterns are still processed.
    """
    if not patterns:
        raise ValueError("no patterns to invert")
    out: List[Optional[RootEstimate]] = []
    for k, p in enumerate(patterns):
        try:
            out.append(invert_pattern(p, profile, medium, bounds, cfg, system))
        except Exception as exc:  # noqa: BLE001 - reported, not swallowed silently
            log.error("pattern %d: inversion failed: %s", k, exc)
            out.append(None)
    return out
