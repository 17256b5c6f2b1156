"""
Accuracy of recovered roots: center and radius errors plus a shape
discrepancy between the recovered and true cross-sections.

The shape discrepancy is the area of the symmetric difference of the two
disks, normalized by the true disk's area. It is 0 for identical disks and
2 for disjoint disks of equal size.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .forward import TargetParams

__all__ = ["disk_overlap_area", "shape_discrepancy", "TargetReport", "EvalReport", "report"]


def disk_overlap_area(c1, r1: float, c2, r2: float) -> float:
    """Intersection area of two disks (circular lens formula)."""
    # fixed argument order keeps the result exactly symmetric
    if (r1, tuple(c1)) > (r2, tuple(c2)):
        c1, r1, c2, r2 = c2, r2, c1, r1
    d = math.dist(c1, c2)
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        return math.pi * min(r1, r2) ** 2
    ca = min(1.0, max(-1.0, (d * d + r1 * r1 - r2 * r2) / (2 * d * r1)))
    cb = min(1.0, max(-1.0, (d * d + r2 * r2 - r1 * r1) / (2 * d * r2)))
    k = 0.5 * math.sqrt(max(0.0, (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)))
    area = r1 * r1 * math.acos(ca) + r2 * r2 * math.acos(cb) - k
    # cancellation near tangency can push the lens slightly out of range
    return min(max(area, 0.0), math.pi * min(r1, r2) ** 2)


def shape_discrepancy(est: TargetParams, truth: TargetParams) -> float:
    if not (est.R > 0 and truth.R > 0):
        raise ValueError("radii must be positive")
    a_est = math.pi * est.R ** 2
    a_true = math.pi * truth.R ** 2
    inter = disk_overlap_area((est.x_c, est.y_c), est.R, (truth.x_c, truth.y_c), truth.R)
    return max(0.0, (a_est + a_true - 2 * inter) / a_true)


@dataclass
class TargetReport:
    target_id: int
    center_error: float
    radius_error: float
    shape_discrepancy: float
    wall_time: float


@dataclass
class EvalReport:
    targets: List[TargetReport] = field(default_factory=list)

    FIELDS = ("target_id", "center_error_m", "radius_error_m", "shape_discrepancy", "wall_time_s")

    def rows(self):
        for t in self.targets:
            yield (t.target_id, t.center_error, t.radius_error, t.shape_discrepancy, t.wall_time)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.FIELDS)
        for row in self.rows():
            w.writerow([row[0]] + [repr(float(v)) for v in row[1:]])
        return buf.getvalue()

    def to_table(self) -> str:
        lines = ["target  center_err[m]  radius_err[m]  shape_disc  time[s]"]
        for t in self.targets:
            lines.append(f"{t.target_id:>6d}  {t.center_error:13.4f}  {t.radius_error:13.4f}"
                         f"  {t.shape_discrepancy:10.3f}  {t.wall_time:7.2f}")
        return "\n".join(lines)


def report(
    estimates: Sequence[TargetParams],
    truths: Sequence[TargetParams],
    timings: Optional[Sequence[float]] = None,
) -> EvalReport:
    """Pair estimates with truths by nearest center and tabulate the errors.

    Pairing minimizes the total center distance, so the report does not
    depend on the order of ``estimates``. Rows follow the order of
    ``truths``; ``target_id`` is the truth index.
    """
    if timings is None:
        timings = [0.0] * len(estimates)
    if len(timings) != len(estimates):
        raise ValueError("one timing per estimate is required")
    ce = np.array([[e.x_c, e.y_c] for e in estimates], dtype=float).reshape(-1, 2)
    ct = np.array([[t.x_c, t.y_c] for t in truths], dtype=float).reshape(-1, 2)
    d = np.linalg.norm(ce[:, None] - ct[None], axis=2)
    ei, ti = linear_sum_assignment(d) if d.size else (np.array([], int), np.array([], int))
    if len(estimates) != len(truths):
        lone_e = sorted(set(range(len(estimates))) - set(ei.tolist()))
        lone_t = sorted(set(range(len(truths))) - set(ti.tolist()))
        raise ValueError(
            f"{len(estimates)} estimates vs {len(truths)} truths; "
            f"unpaired estimates {lone_e}, unpaired truths {lone_t}"
        )
    order = np.argsort(ti)
    rows = []
    for i, j in zip(ei[order], ti[order]):
        e, t = estimates[i], truths[j]
        rows.append(TargetReport(
            int(j),
            float(math.hypot(e.x_c - t.x_c, e.y_c - t.y_c)),
            float(abs(e.R - t.R)),
            shape_discrepancy(e, t),
            float(timings[i]),
        ))
    return EvalReport(rows)
