import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsgeval import measures as m
from tsgeval.errors import DegenerateError, PairingError, ShapeError

from .oracles import moments, window_acf_loops


def col(values):
    return np.asarray(values, dtype=float).reshape(-1, 1, 1)


def test_mdd_hand_histogram():
    # bins [0, .5), [.5, 1]: orig freqs (.5, .5), gen (1, 0)
    assert m.mdd(col([0, 1]), col([0, 0]), bins=2) == 0.5


def test_mdd_clamps_out_of_range():
    # gen values beyond orig's range land in the end bins
    assert m.mdd(col([0, 1]), col([-5, 9]), bins=2) == 0.0


def test_mdd_identical_is_zero(small_pair):
    o, _ = small_pair
    assert m.mdd(o, o) == 0.0


def test_mdd_shape_mismatch():
    with pytest.raises(ShapeError):
        m.mdd(np.ones((3, 4, 2)), np.ones((3, 5, 2)))


def test_window_acf_matches_loops(rng):
    x = rng.normal(size=(6, 11, 2))
    got = m.window_acf(x, 10)
    for i in range(2):
        ref = window_acf_loops([x[r, :, i].tolist() for r in range(6)], 10)
        np.testing.assert_allclose(got[:, i], ref, rtol=0, atol=1e-13)


def test_acd_alternating_vs_flat():
    l = 10
    alt = np.tile(np.array([1.0, -1.0] * (l // 2)).reshape(1, l, 1), (4, 1, 1))
    flat = np.ones((4, l, 1))
    # biased ACF of +-1 alternation: (-1)^k (l - k) / l; flat windows count as 0
    expected = np.mean([(l - k) / l for k in range(1, l)])
    assert m.acd(alt, flat) == pytest.approx(expected, abs=1e-14)


def test_sd_brute_force():
    orig = col([-1, 0, 1] * 4)
    gen = col([0, 0, 3, -1, -1, -1])
    skew_gen, _ = moments([0, 0, 3, -1, -1, -1])
    assert skew_gen == pytest.approx(math.sqrt(2))
    assert m.sd(orig, gen) == pytest.approx(skew_gen, abs=1e-14)


def test_kd_two_point_vs_three():
    orig = col([-1, 1] * 5)
    gen = col([-1, 0, 0, 0, 0, 1])
    assert moments([-1, 1])[1] == 1.0
    assert moments([-1, 0, 0, 0, 0, 1])[1] == pytest.approx(3.0)
    assert m.kd(orig, gen) == pytest.approx(2.0, abs=1e-14)


def test_moments_degenerate_dimension():
    x = np.random.default_rng(0).normal(size=(5, 4, 3))
    x[..., 1] = 2.0
    with pytest.raises(DegenerateError, match="dimension 1"):
        m.sd(x, x)


def test_ed_examples():
    a = np.zeros((1, 3, 1))
    b = np.ones((1, 3, 1))
    assert m.ed(a, b, "index") == pytest.approx(math.sqrt(3))
    assert m.ed(a, b) == pytest.approx(math.sqrt(3))


def test_ed_index_pairing_needs_equal_r():
    with pytest.raises(PairingError):
        m.ed(np.ones((3, 2, 1)), np.ones((4, 2, 1)), "index")


def test_nearest_original_brute_force(rng):
    o = rng.normal(size=(50, 4, 2))
    g = rng.normal(size=(20, 4, 2))
    idx, dist = m.nearest_original(o, g)
    for r in range(20):
        d = [math.dist(g[r].ravel(), o[s].ravel()) for s in range(50)]
        assert idx[r] == int(np.argmin(d))
        assert dist[r] == pytest.approx(min(d), abs=1e-12)


def test_dtw_set_reuses_ed_partner(rng):
    o = rng.normal(size=(30, 6, 2))
    g = rng.normal(size=(10, 6, 2))
    idx, _ = m.nearest_original(o, g)
    expected = np.mean([m.dtw(o[idx[r]], g[r]) for r in range(10)])
    assert m.dtw_set(o, g) == pytest.approx(expected, abs=1e-12)


def test_suite_identical_all_zero(small_pair):
    o, _ = small_pair
    rep = m.run_suite(o, o, m.MeasureConfig(repeats=3))
    assert set(rep.entries) == set(m.MEASURES)
    for name in m.MEASURES:
        assert rep.entries[name] == (0.0, 0.0)


def test_suite_deterministic_std_zero(small_pair):
    o, g = small_pair
    rep = m.run_suite(o, g, m.MeasureConfig(repeats=5))
    for name in m.MEASURES:
        mean, std = rep.entries[name]
        assert std == 0.0 and mean > 0


def test_suite_subsample_redraws(small_pair):
    o, g = small_pair
    rep = m.run_suite(o, g, m.MeasureConfig(repeats=4, nn_subsample=15, seed=3))
    assert rep.entries["ED"][1] > 0


def test_suite_failed_measure_reported(rng):
    o = rng.normal(size=(10, 5, 2))
    g = o.copy()
    g[..., 1] = 1.0  # constant dimension breaks SD/KD only
    rep = m.run_suite(o, g, m.MeasureConfig(repeats=1))
    assert "SD" not in rep.entries and "KD" not in rep.entries
    assert "DegenerateError" in rep.diagnostics["SD"]
    assert {"MDD", "ACD", "ED", "DTW"} <= set(rep.entries)


def test_report_json_round_trip(small_pair):
    o, g = small_pair
    rep = m.run_suite(o, g, m.MeasureConfig(repeats=1))
    rep.merge_external({"DS": (0.1, 0.02), "C-FID": 0.5})
    back = m.MeasureReport.from_dict(__import__("json").loads(rep.to_json()))
    assert back.entries == rep.entries
    assert back.provenance["orig_sha256"] == rep.provenance["orig_sha256"]


def test_timed():
    _, t = m.timed("noop", lambda: None)
    assert 0 <= t < 1e-3
    t0 = time.perf_counter()
    _, t = m.timed("sleep", time.sleep, 0.1)
    wall = time.perf_counter() - t0
    assert 0.1 <= t <= wall
    sink = {}
    with m.timing_scope("train", sink):
        time.sleep(0.01)
    assert sink["train"] > 0
    rep = m.run_suite(np.ones((2, 3, 1)) * [[[1], [2], [3]]], np.ones((2, 3, 1)) * [[[1], [2], [4]]],
                      m.MeasureConfig(repeats=1), timings=sink)
    assert rep.wall_clock["train"] > 0


# -- randomized property suite (>= 200 cases each) --------------------------

def _tensor_pair(seed):
    r = np.random.default_rng(seed)
    R1, R2 = r.integers(2, 12), r.integers(2, 12)
    l, N = r.integers(2, 9), r.integers(1, 4)
    o = r.normal(size=(R1, l, N)) * r.uniform(0.1, 3)
    g = r.normal(loc=r.uniform(-1, 1), size=(R2, l, N)) * r.uniform(0.1, 3)
    return r, o, g


seeds = st.integers(0, 2**32 - 1)
PROPS = settings(max_examples=200, deadline=None)


@PROPS
@given(seeds)
def test_prop_non_negative_and_mdd_bound(seed):
    _, o, g = _tensor_pair(seed)
    vals = [m.mdd(o, g), m.acd(o, g), m.sd(o, g), m.kd(o, g), m.ed(o, g), m.dtw_set(o, g)]
    assert all(v >= 0 for v in vals)
    assert vals[0] <= 2.0


@PROPS
@given(seeds)
def test_prop_zero_law(seed):
    _, o, _ = _tensor_pair(seed)
    cfg = m.MeasureConfig(pairing="index", repeats=1)
    rep = m.run_suite(o, o.copy(), cfg)
    assert all(abs(rep.mean(name)) <= 1e-9 for name in m.MEASURES)


@PROPS
@given(seeds)
def test_prop_permutation_invariance(seed):
    r, o, g = _tensor_pair(seed)
    po = o[r.permutation(len(o))]
    pg = g[r.permutation(len(g))]
    for fn in (m.mdd, m.acd, m.sd, m.kd):
        assert fn(po, pg) == pytest.approx(fn(o, g), rel=1e-10, abs=1e-12)
    assert m.ed(po, g) == pytest.approx(m.ed(o, g), rel=1e-12)
    assert m.dtw_set(po, g) == pytest.approx(m.dtw_set(o, g), rel=1e-12)


@PROPS
@given(seeds)
def test_prop_dtw_symmetry_and_bounds(seed):
    r = np.random.default_rng(seed)
    N = r.integers(1, 4)
    a = r.normal(size=(r.integers(1, 10), N))
    b = r.normal(size=(r.integers(1, 10), N))
    d = m.dtw(a, b)
    assert d == pytest.approx(m.dtw(b, a), rel=1e-12, abs=1e-15)
    assert m.dtw(a, a) == 0.0
    costs = np.sqrt(((a[:, None] - b[None]) ** 2).sum(-1))
    assert d <= (len(a) + len(b)) * costs.max() + 1e-12
    if len(a) == len(b):
        assert d <= np.trace(costs) + 1e-12


@PROPS
@given(seeds)
def test_prop_moment_affine_invariance(seed):
    r, o, g = _tensor_pair(seed)
    scale, shift = r.uniform(0.01, 100), r.uniform(-50, 50)
    assert m.sd(o, g * scale + shift) == pytest.approx(m.sd(o, g), rel=1e-6, abs=1e-9)
    assert m.kd(o, g * scale + shift) == pytest.approx(m.kd(o, g), rel=1e-6, abs=1e-9)


@PROPS
@given(seeds)
def test_prop_ed_scale_sensitivity(seed):
    _, o, _ = _tensor_pair(seed)
    assert m.ed(o, o, "index") == 0.0
    assert m.ed(o, 2 * o, "index") > 0.0
