"""Locate buried cylindrical targets (tree roots) in GPR B-scans over uneven ground."""

from .forward import (AcquisitionConfig, MediumParams, TargetParams, depth_resolution,
                      synthesize_bscan, travel_time_ahf, travel_time_wb)
from .geometry import (AntennaTrack, SurfaceProfile, System, arc_length_map, build_ahf_track,
                       build_surface, build_wb_track, locate_wb_antenna, surface_intersection)
from .inversion import PsoConfig, RootEstimate, SearchBounds, invert_all, invert_pattern, pso_minimize
from .metrics import EvalReport, report, shape_discrepancy
from .preprocess import bandpass, dc_remove, svd_background_removal, time_gain, time_zero_correct
from .radargram import Radargram
from .roi import ExtractedPattern, c3_cluster, extract_patterns

__version__ = "0.1.0"
