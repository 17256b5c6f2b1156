# %% [markdown]
# # Surfaces and antenna tracks
#
# The scene is a vertical slice with y measured downward from the fixed
# antenna height H0. A wheel-based (WB) antenna only knows how far it has
# rolled, so its positions come from the arc length of the ground profile.
# An antenna-height-fixed (AHF) antenna moves in straight steps along y = 0.

# %%
import numpy as np

from rootradar.geometry import (arc_length_map, build_ahf_track, build_surface,
                                build_wb_track, locate_wb_antenna, surface_intersection)

x = np.round(np.arange(0.0, 2.0001, 0.01), 10)
y = 0.265 - 0.105 * np.cos(np.pi * (x - 1.04) / 0.56)
profile = build_surface(np.column_stack([x, y]))
print(f"{len(profile.x)} points after densification, relief {y.max() - y.min():.2f} m")

# %% [markdown]
# Rolled distance and scene position.

# %%
amap = arc_length_map(profile)
print(f"curve length {amap.total_length:.4f} m over a {x[-1]:.1f} m horizontal run")
for s in (0.0, 0.5, 1.0, amap.total_length):
    p = locate_wb_antenna(amap, s)
    print(f"  rolled {s:6.3f} m -> x = {p.x:.4f}, y = {p.y:.4f}")

# %%
wb = build_wb_track(amap, 0.02)
ahf = build_ahf_track(0.12, 1.80, 0.02)
print(f"WB track: {len(wb)} A-scans, AHF track: {len(ahf)} A-scans")

# %% [markdown]
# Where does the straight ray from an AHF antenna to a buried point cross
# the ground?

# %%
for ax in (0.4, 1.0, 1.6):
    g = surface_intersection(profile, (ax, 0.0), (1.0, 0.5))
    print(f"antenna x = {ax}: ray enters the soil at ({g.x:.4f}, {g.y:.4f})")
