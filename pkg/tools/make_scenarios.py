"""Regenerate the bundled scenario sessions and surface profiles."""

from pathlib import Path

import numpy as np

from rootradar.fileio import PsoParams, PreprocessParams, SessionConfig, save_session, save_surface
from rootradar.geometry import System

HERE = Path(__file__).resolve().parents[1] / "src" / "rootradar" / "scenarios"


def grid(x_end):
    return np.round(np.arange(0.0, x_end + 1e-9, 0.01), 10)


SURFACES = {
    # gentle two-tone undulation
    "s1": lambda x: 0.08 + 0.04 * np.sin(2 * np.pi * x / 1.3) + 0.015 * np.sin(2 * np.pi * x / 0.45),
    # field-style mound: 0.21 m relief, 0.56 m between crest and trough
    "s1_field": lambda x: 0.265 - 0.105 * np.cos(np.pi * (x - 1.04) / 0.56),
    # short-period ridges; arc length just over 2 m
    "s2": lambda x: 0.13 + 0.07 * np.sin(2 * np.pi * x / 0.8),
    "s3": lambda x: 0.07 - 0.04 * np.sin(2 * np.pi * (x - 0.2) / 1.1),
}
EXTENT = {"s1": 2.0, "s1_field": 2.0, "s2": 1.88, "s3": 2.0}

ONE_ROOT = [[1.00, 0.50, 0.10]]
THREE_ROOTS = [[0.50, 0.25, 0.15], [1.00, 0.50, 0.10], [1.50, 0.40, 0.08]]

SCENARIOS = {
    "s1_wb": ("WB", "s1", ONE_ROOT, 0.14, 1.84),
    "s1_ahf": ("AHF", "s1_field", ONE_ROOT, 0.12, 1.80),
    "s2_wb": ("WB", "s2", ONE_ROOT, 0.0, None),
    "s2_ahf": ("AHF", "s2", ONE_ROOT, 0.12, 1.80),
    "s3_wb": ("WB", "s3", THREE_ROOTS, 0.10, 1.88),
    "s3_ahf": ("AHF", "s3", THREE_ROOTS, 0.12, 1.80),
}


def main():
    for name, f in SURFACES.items():
        x = grid(EXTENT[name])
        save_surface(np.column_stack([x, f(x)]), HERE / "surfaces" / f"{name}.csv")
    for name, (system, surf, targets, start, end) in SCENARIOS.items():
        y_top = float(SURFACES[surf](grid(EXTENT[surf])).min())
        cfg = SessionConfig(
            system=System(system), eps=6.02, surface_csv=f"surfaces/{surf}.csv",
            h0_m=round(y_top, 4), track_start_m=start, track_end_m=end, targets=targets,
            # the synthetic clutter is a single rank-1 coupling wavelet
            preprocess=PreprocessParams(k_dominant=1),
            pso=PsoParams(),
        )
        save_session(cfg, HERE / f"{name}.json")
        print("wrote", name)


if __name__ == "__main__":
    main()
