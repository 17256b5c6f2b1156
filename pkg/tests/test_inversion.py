import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rootradar.forward import C0, MediumParams, TargetParams, wb_times
from rootradar.geometry import System, build_surface
from rootradar.inversion import (PsoConfig, SearchBounds, batch_cost, cost_ahf, cost_wb,
                                 default_bounds, invert_all, invert_pattern, pso_minimize,
                                 velocity_update)
from rootradar.roi import ExtractedPattern, extract_patterns

MED = MediumParams(6.02)


def flat_at(y):
    return build_surface([(0, y), (2, y)])


def pattern_from_model(xa, ya, tg, eps=6.02, window=25.6e-9):
    t = wb_times(xa, ya, tg.x_c, tg.y_c, tg.R, eps)
    return ExtractedPattern(np.column_stack([xa, ya, t]), window)


# -- cost ---------------------------------------------------------------------------

def test_true_candidate_cost_bounded_by_quantization(scene):
    for name in ("s1_wb", "s1_ahf"):
        s = scene(name)
        (pat,) = extract_patterns(s.preprocessed())
        tg = s.targets[0]
        c = (cost_wb(pat, tg, s.medium) if s.cfg.system is System.WB
             else cost_ahf(pat, s.profile, tg, s.medium))
        assert 0 <= c <= len(pat) * s.cfg.sample_interval_s ** 2


def test_radius_offset_cost_matches_hand_expansion():
    tg = TargetParams(1.0, 0.5, 0.1)
    pat = pattern_from_model(np.array([1.0]), np.array([0.0]), tg)
    delta = 0.013
    c = cost_wb(pat, TargetParams(1.0, 0.5, 0.1 + delta), MED)
    assert c == pytest.approx((2 * math.sqrt(6.02) * delta / C0) ** 2, rel=1e-9)


def test_empty_pattern_rejected():
    empty = ExtractedPattern(np.empty((0, 3)), 1e-8)
    with pytest.raises(ValueError):
        cost_wb(empty, TargetParams(1, 0.5, 0.1), MED)
    with pytest.raises(ValueError):
        invert_pattern(empty, flat_at(0.0), MED)


def test_ahf_cost_equals_wb_on_surface_at_h0():
    prof = flat_at(0.0)
    xa = np.linspace(0.2, 1.8, 30)
    pat = pattern_from_model(xa, np.zeros_like(xa), TargetParams(0.9, 0.4, 0.08))
    for cand in (TargetParams(0.9, 0.4, 0.08), TargetParams(1.1, 0.6, 0.05)):
        assert cost_ahf(pat, prof, cand, MED) == pytest.approx(cost_wb(pat, cand, MED), rel=1e-12)


def test_candidate_above_surface_is_all_penalty():
    prof = flat_at(0.2)
    xa = np.linspace(0.5, 1.5, 11)
    pat = pattern_from_model(xa, np.zeros_like(xa), TargetParams(1.0, 0.5, 0.1))
    c = cost_ahf(pat, prof, TargetParams(1.0, 0.1, 0.05), MED)
    assert c == pytest.approx(len(pat) * (10 * pat.time_window) ** 2)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.2, 1.8), st.floats(0.3, 0.9), st.floats(0.01, 0.3))
def test_cost_nonnegative_and_zero_only_at_exact_fit(xc, yc, r):
    xa = np.linspace(0.2, 1.8, 20)
    truth = TargetParams(1.0, 0.5, 0.1)
    pat = pattern_from_model(xa, np.full_like(xa, 0.05), truth)
    c = cost_wb(pat, TargetParams(xc, yc, r), MED)
    assert c >= 0
    if c == 0:
        assert (xc, yc, r) == pytest.approx((1.0, 0.5, 0.1), abs=1e-6)


def test_batch_cost_matches_scalar_cost():
    xa = np.linspace(0.2, 1.8, 20)
    pat = pattern_from_model(xa, np.zeros_like(xa), TargetParams(1.0, 0.5, 0.1))
    q = np.array([[1.0, 0.5, 0.1], [0.8, 0.6, 0.05], [1.2, 0.3, 0.2]])
    batch = batch_cost(pat, q, MED)
    assert batch == pytest.approx([cost_wb(pat, TargetParams(*row), MED) for row in q], rel=1e-12)


# -- swarm -----------------------------------------------------------------------------

def quadratic(q):
    return (q[:, 0] - 1) ** 2 + (q[:, 1] - 2) ** 2 + (q[:, 2] - 0.1) ** 2


QBOUNDS = SearchBounds((-5, 5), (-5, 5), (0.01, 1.0))


def test_separable_quadratic():
    e = pso_minimize(quadratic, QBOUNDS, PsoConfig(seed=1), vectorized=True)
    assert (e.x_c, e.y_c, e.R) == pytest.approx((1, 2, 0.1), abs=1e-4)


def test_scalar_and_vectorized_callables_agree():
    a = pso_minimize(quadratic, QBOUNDS, PsoConfig(seed=4), vectorized=True)
    b = pso_minimize(lambda p: quadratic(p[None])[0], QBOUNDS, PsoConfig(seed=4))
    assert (a.x_c, a.y_c, a.R, a.iterations) == (b.x_c, b.y_c, b.R, b.iterations)


@pytest.mark.parametrize("seed", range(100))
def test_global_best_never_increases(seed):
    e = pso_minimize(quadratic, QBOUNDS, PsoConfig(seed=seed, max_iters=60), vectorized=True)
    assert np.all(np.diff(e.history) <= 0)
    assert len(e.history) == e.iterations + 1


def test_fixed_seed_is_bit_reproducible():
    a = pso_minimize(quadratic, QBOUNDS, PsoConfig(seed=9), vectorized=True)
    b = pso_minimize(quadratic, QBOUNDS, PsoConfig(seed=9), vectorized=True)
    assert (a.x_c, a.y_c, a.R, a.final_cost, a.iterations) == (b.x_c, b.y_c, b.R, b.final_cost, b.iterations)
    assert np.array_equal(a.history, b.history)


def test_estimate_stays_in_bounds():
    # unconstrained optimum sits outside the box: the swarm pins to the wall
    bounds = SearchBounds((2, 3), (-1, 1), (0.2, 0.5))
    e = pso_minimize(quadratic, bounds, PsoConfig(seed=0), vectorized=True)
    assert (e.x_c, e.y_c, e.R) == pytest.approx((2, 1, 0.2), abs=1e-6)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-3, -0.1), st.floats(-3, -0.1), st.floats(0, 1))
def test_update_equals_canonical_attraction_form(seed, phi1, phi2, phi0):
    g = np.random.default_rng(seed)
    v, q, qb = g.normal(size=(3, 7, 3))
    qg = g.normal(size=3)
    v1, v2 = g.uniform(size=(2, 7))
    ours = velocity_update(v, q, qb, qg, v1, v2, phi0, phi1, phi2)
    canonical = (phi0 * v + abs(phi1) * v1[:, None] * (qb - q)
                 + abs(phi2) * v2[:, None] * (qg - q))
    assert np.abs(ours - canonical).max() <= 1e-12


def test_config_validation():
    with pytest.raises(ValueError):
        PsoConfig(n_particles=1)
    with pytest.raises(ValueError):
        PsoConfig(max_iters=0)
    with pytest.raises(ValueError):
        SearchBounds((1, 0), (0, 1))
    with pytest.raises(ValueError):
        SearchBounds((0, 1), (0, 1), (0.0, 0.2))


# -- inversion on synthetic data ------------------------------------------------------------

def test_default_bounds():
    prof = build_surface([(0, 0.1), (1, 0.3), (2, 0.2)])
    b = default_bounds(prof, MED, 25.6e-9, (0.12, 1.8))
    assert b.x_range == (0.12, 1.8)
    assert b.y_range == pytest.approx((0.3, C0 * 25.6e-9 / (2 * math.sqrt(6.02))))
    assert b.r_range == (0.005, 0.30)


def test_noise_free_wb_round_trip(scene):
    s = scene("s1_wb")
    (pat,) = extract_patterns(s.preprocessed())
    e = invert_pattern(pat, s.profile, s.medium)
    assert (e.x_c, e.y_c, e.R) == pytest.approx((1.0, 0.5, 0.1), abs=0.005)
    assert e.final_cost >= 0


def test_time_shift_moves_radius_only():
    # flat ground, symmetric pattern: a constant delay is absorbed by R
    prof = flat_at(0.0)
    xa = np.linspace(0.5, 1.5, 51)
    truth = TargetParams(1.0, 0.5, 0.1)
    pat = pattern_from_model(xa, np.zeros_like(xa), truth)
    dt = 0.025e-9
    bounds = SearchBounds((0.5, 1.5), (0.2, 1.0), (0.005, 0.3))
    base = invert_pattern(pat, prof, MED, bounds)
    shift = 0.2e-9
    moved = invert_pattern(pat.with_times(pat.ta + shift), prof, MED, bounds)
    expect = -shift * C0 / (2 * math.sqrt(6.02))
    assert moved.R - base.R == pytest.approx(expect, abs=2 * dt * C0 / (2 * math.sqrt(6.02)))


def test_invert_all_three_roots(scene):
    s = scene("s3_wb")
    pats = extract_patterns(s.preprocessed())
    est = invert_all(pats, s.profile, s.medium, system="WB")
    assert len(est) == 3
    for e, t in zip(est, s.targets):
        assert (e.x_c, e.y_c, e.R) == pytest.approx((t.x_c, t.y_c, t.R), abs=0.02)


def test_invert_all_list_sizes():
    xa = np.linspace(0.5, 1.5, 21)
    pat = pattern_from_model(xa, np.zeros_like(xa), TargetParams(1.0, 0.5, 0.1))
    assert len(invert_all([pat], flat_at(0.0), MED)) == 1
    with pytest.raises(ValueError):
        invert_all([], flat_at(0.0), MED)


def test_invert_all_isolates_failures(caplog):
    xa = np.linspace(0.5, 1.5, 21)
    good = pattern_from_model(xa, np.zeros_like(xa), TargetParams(1.0, 0.5, 0.1))
    bad = ExtractedPattern(np.empty((0, 3)), 1e-8)
    out = invert_all([bad, good], flat_at(0.0), MED)
    assert out[0] is None and out[1] is not None
    assert "pattern 0" in caplog.text


def test_ahf_cost_requires_profile():
    xa = np.linspace(0.5, 1.5, 5)
    pat = pattern_from_model(xa, np.zeros_like(xa), TargetParams(1.0, 0.5, 0.1))
    with pytest.raises(ValueError):
        batch_cost(pat, [1.0, 0.5, 0.1], MED, System.AHF)
