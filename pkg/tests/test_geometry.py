import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rootradar.geometry import (Point, System, arc_length_map, build_ahf_track, build_surface,
                                build_wb_track, first_crossing, locate_wb_antenna,
                                surface_intersection)

FLAT = build_surface([(0, 0), (2, 0)])


def flat_at(y, x_end=2.0):
    return build_surface([(0, y), (x_end, y)])


# -- build_surface ----------------------------------------------------------

def test_flat_surface_densifies_to_2001_points():
    assert len(FLAT.x) == 2001
    assert np.all(FLAT.y == 0)


def test_linear_midpoint():
    p = build_surface([(0, 0), (1, 0.21)])
    i = np.argmin(np.abs(p.x - 0.5))
    assert p.x[i] == pytest.approx(0.5)
    assert p.y[i] == pytest.approx(0.105, abs=1e-12)


def test_two_segment_polyline():
    p = build_surface([(0, 0), (0.56, 0.21), (2, 0.21)])
    assert p.height_at(0.28) == pytest.approx(0.105, abs=1e-12)
    i = np.argmin(np.abs(p.x - 0.28))
    assert p.y[i] == pytest.approx(0.105, abs=1e-9)


@pytest.mark.parametrize("pts, msg", [
    ([(0, 0), (1, 0), (0.5, 0)], "increasing"),
    ([(0, 0), (1, -0.1)], ">= 0"),
    ([(0.1, 0), (1, 0)], "x = 0"),
    ([(0, 0)], "two"),
])
def test_rejects_bad_surfaces(pts, msg):
    with pytest.raises(ValueError, match=msg):
        build_surface(pts)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(0.01, 0.3), st.floats(0.0, 0.4)), min_size=1, max_size=12),
       st.sampled_from([0.001, 0.004, 0.01]))
def test_densified_spacing_and_knots_preserved(steps, res):
    x = np.concatenate([[0.0], np.cumsum([s[0] for s in steps])])
    y = np.concatenate([[0.1], [s[1] for s in steps]])
    p = build_surface(np.column_stack([x, y]), res)
    assert np.all(np.diff(p.x) > 0)
    assert np.diff(p.x).max() <= res + 1e-12
    assert np.all(p.y >= 0)
    assert p.x[0] == 0.0
    # every raw knot appears verbatim in the densified profile
    assert np.all(np.isin(x, p.x))


# -- arc length ---------------------------------------------------------------

def test_flat_total_length():
    assert arc_length_map(FLAT).total_length == pytest.approx(2.0, abs=1e-4)


def test_slope_total_length_345():
    m = arc_length_map(build_surface([(0, 0), (0.3, 0.4)]))
    assert m.total_length == pytest.approx(0.5, abs=1e-4)


def test_quarter_circle_length():
    # circle of radius 1 centered at (0, 1): y = 1 - sqrt(1 - x^2), x in [0, 1)
    th = np.linspace(0, np.pi / 2, 1571)
    x, y = np.sin(th), 1 - np.cos(th)
    m = arc_length_map(build_surface(np.column_stack([x, y])))
    assert abs(m.total_length - math.pi / 2) / (math.pi / 2) <= 1e-3


def test_arc_length_map_invariants():
    x = np.linspace(0, 2, 201)
    m = arc_length_map(build_surface(np.column_stack([x, 0.1 + 0.05 * np.sin(5 * x)])))
    assert m.s[0] == 0 and m.s[-1] == m.total_length
    assert np.all(np.diff(m.s) >= 0)
    assert m.total_length > 2.0


def test_locate_flat_identity():
    m = arc_length_map(FLAT)
    for s in np.linspace(0, 2, 41):
        p = locate_wb_antenna(m, s)
        assert p.x == pytest.approx(s, abs=1e-4)
        assert p.y == pytest.approx(0.0, abs=1e-9)
    assert locate_wb_antenna(m, 0.7) == pytest.approx(Point(0.7, 0.0), abs=1e-4)


def test_locate_on_slope():
    m = arc_length_map(build_surface([(0, 0), (0.3, 0.4)]))
    assert locate_wb_antenna(m, 0.25) == pytest.approx((0.15, 0.20), abs=1e-3)


def test_locate_origin_and_range():
    p = build_surface([(0, 0.1), (0.5, 0.2), (1.0, 0.15)])
    m = arc_length_map(p)
    assert locate_wb_antenna(m, 0.0) == pytest.approx((0.0, 0.1), abs=1e-9)
    with pytest.raises(ValueError):
        locate_wb_antenna(m, m.total_length + 0.01)
    with pytest.raises(ValueError):
        locate_wb_antenna(m, -0.01)


UNDULATED = build_surface(np.column_stack([
    np.linspace(0, 2, 201), 0.2 + 0.1 * np.sin(np.linspace(0, 2, 201) * 4)]))
UNDULATED_MAP = arc_length_map(UNDULATED)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1))
def test_locate_is_monotone_in_x(a, b):
    s1, s2 = sorted((a, b))
    L = UNDULATED_MAP.total_length
    assert locate_wb_antenna(UNDULATED_MAP, s2 * L).x >= locate_wb_antenna(UNDULATED_MAP, s1 * L).x - 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 9999))
def test_locate_round_trip_on_samples(k):
    m = UNDULATED_MAP
    p = locate_wb_antenna(m, m.s[k])
    assert math.hypot(p.x - m.x[k], p.y - m.y[k]) <= 1e-3


def test_map_samples_lie_on_surface():
    m = UNDULATED_MAP
    assert np.abs(m.y - UNDULATED.height_at(m.x)).max() <= UNDULATED.resolution


# -- tracks ---------------------------------------------------------------------

def test_ahf_track_85_positions():
    t = build_ahf_track(0.12, 1.80, 0.02)
    assert len(t) == 85 and t.system is System.AHF
    assert np.all(t.ya == 0)
    assert t.xa[-1] == pytest.approx(1.80)


def test_wb_flat_101_positions():
    t = build_wb_track(arc_length_map(FLAT), 0.02)
    assert len(t) == 101


def test_wb_track_on_surface():
    t = build_wb_track(UNDULATED_MAP, 0.02)
    assert np.abs(t.ya - UNDULATED.height_at(t.xa)).max() <= UNDULATED.resolution


def test_scenario2_surface_gives_101_wb_positions(scene):
    s = scene("s2_wb")
    L = arc_length_map(s.profile).total_length
    assert 2.00 <= L < 2.02
    assert len(s.track) == 101


def test_empty_tracks_rejected():
    with pytest.raises(ValueError):
        build_ahf_track(1.0, 0.5, 0.02)
    with pytest.raises(ValueError):
        build_wb_track(arc_length_map(FLAT), 0.0)


# -- intersection ----------------------------------------------------------------

def test_vertical_ray():
    assert surface_intersection(flat_at(0.2), (0, 0), (0, 0.5)) == pytest.approx((0.0, 0.2), abs=1e-12)


def test_oblique_ray():
    # direction (0.6, 0.8); y = 0.2 is reached at t = 0.25
    assert surface_intersection(flat_at(0.2), (0.4, 0), (1.0, 0.8)) == pytest.approx((0.55, 0.2), abs=1e-12)


def test_center_above_h0_is_infeasible():
    assert surface_intersection(flat_at(0.2), (0, 0), (0, -0.1)) is None


def test_center_above_surface_is_infeasible():
    assert surface_intersection(flat_at(0.2), (0, 0), (0.5, 0.1)) is None


def test_first_crossing_takes_nearest_hit():
    # a ridge crossed twice by the ray: the first entry wins
    p = build_surface([(0, 0.3), (0.5, 0.1), (1.0, 0.3), (2.0, 0.3)])
    g = surface_intersection(p, (0.0, 0.0), (1.0, 0.6))
    # ray y = 0.6 x meets the ridge's left flank y = 0.3 - 0.4 x at x = 0.3
    assert g == pytest.approx((0.3, 0.18), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 2.0), st.floats(0.0, 2.0), st.floats(0.35, 0.9))
def test_intersection_lies_on_segment_and_surface(ax, cx, cy):
    g = surface_intersection(UNDULATED, (ax, 0.0), (cx, cy))
    if g is None:
        assert cy < UNDULATED.height_at(cx)
        return
    assert abs(g.y - UNDULATED.height_at(g.x)) <= UNDULATED.resolution
    # collinear with the antenna-center segment and between its ends
    cross = (g.x - ax) * cy - g.y * (cx - ax)
    assert abs(cross) <= 1e-9
    assert min(ax, cx) - 1e-12 <= g.x <= max(ax, cx) + 1e-12


def test_first_crossing_chunked_matches_single_ray():
    rng = np.random.default_rng(3)
    ax = rng.uniform(0, 2, 3000)
    cx = rng.uniform(0, 2, 3000)
    cy = rng.uniform(0.35, 0.9, 3000)
    xg, yg = first_crossing(UNDULATED.knots, ax, 0.0, cx, cy)
    for k in range(0, 3000, 397):
        gx, gy = first_crossing(UNDULATED.knots, ax[k], 0.0, cx[k], cy[k])
        assert (gx, gy) == (xg[k], yg[k])
