# %% [markdown]
# # Synthetic B-scans
#
# Travel times from both models, a synthesized B-scan with three roots, and
# a grayscale heatmap of it.

# %%
from pathlib import Path

import numpy as np

from rootradar import fileio, scenarios
from rootradar.forward import depth_resolution, travel_time_ahf, travel_time_wb

cfg = fileio.load_session(scenarios.path("s3_wb"))
profile = cfg.surface()
track = fileio.session_track(cfg, profile)
medium = cfg.medium
roots = cfg.target_params
print(f"eps = {medium.eps}, depth resolution at 3 GHz: {depth_resolution(3e9, medium.eps) * 100:.1f} cm")

# %% [markdown]
# Two-way times to the middle root from the track's midpoint, for both
# acquisition geometries.

# %%
mid = track.positions[len(track) // 2]
t_wb = travel_time_wb(mid, roots[1], medium)
t_ahf = travel_time_ahf(profile, (mid[0], 0.0), roots[1], medium)
print(f"WB: {t_wb * 1e9:.3f} ns   AHF: {t_ahf * 1e9:.3f} ns")

# %%
from rootradar.forward import synthesize_bscan

bscan = synthesize_bscan(profile, roots, track, medium, cfg.acquisition(), rng=0)
print(f"B-scan {bscan.n_samples} samples x {bscan.n_traces} traces, "
      f"window {bscan.time_window * 1e9:.1f} ns")

out = Path("demo_out")
out.mkdir(exist_ok=True)
fileio.render_heatmap(bscan, out / "s3_raw.pgm")
print("heatmap written to", out / "s3_raw.pgm")
