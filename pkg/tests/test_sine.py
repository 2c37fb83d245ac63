import numpy as np
import pytest

from tsgeval import sine
from tsgeval.measures import MeasureConfig


def test_range_shape_determinism():
    cfg = sine.SineConfig(r_count=500, seq_len=24, seed=7)
    x = sine.gen_sine(cfg)
    assert x.shape == (500, 24, 5)
    assert np.abs(x).max() <= 1.0
    assert sine.gen_sine(cfg).tobytes() == x.tobytes()
    assert not np.array_equal(x, sine.gen_sine(sine.SineConfig(r_count=500, seed=8)))


def test_default_shape():
    assert sine.gen_sine(sine.SineConfig()).shape == (10000, 24, 5)


def test_eta_zero_is_constant():
    theta = np.array([[0.3, -2.0]])
    x = sine.sine_windows(np.zeros((1, 2)), theta, 10)
    np.testing.assert_array_equal(x[0], np.tile(np.sin(theta), (10, 1)))


def test_formula_indexing_starts_at_one():
    x = sine.sine_windows(np.array([[0.25]]), np.array([[0.0]]), 4)
    np.testing.assert_allclose(x[0, :, 0], [1.0, 0.0, -1.0, 0.0], atol=1e-15)


def test_shared_params_mode():
    x = sine.gen_sine(sine.SineConfig(r_count=20, seq_len=8, shared_params=True))
    for i in range(1, 5):
        np.testing.assert_array_equal(x[..., 0], x[..., i])


def test_marginal_moments():
    x = sine.gen_sine(sine.SineConfig(seed=3))
    pooled = x.reshape(-1, 5)
    assert np.abs(pooled.mean(axis=0)).max() < 0.02
    # arcsine marginal of a random-phase sine: variance 1/2
    assert np.abs(pooled.var(axis=0) - 0.5).max() < 0.02


def test_small_robustness_table():
    cfg = MeasureConfig(repeats=2)
    tables = {l: sine.run_robustness(l, seed=0, cfg=cfg, r_count=300) for l in (8, 16)}
    for l in (8, 16):
        assert all(v == (0.0, 0.0) for v in tables[l]["Identical"].entries.values())
        assert all(v[0] > 0 for v in tables[l]["Random Sampling"].entries.values())
    rows = sine.robustness_rows(tables, r_count=300)
    assert [r["Input"] for r in rows] == ["Identical"] * 2 + ["Random Sampling"] * 2
    assert rows[0]["Shape (R,l,N)"] == "(300, 8, 5)"
    csv_text = sine.robustness_csv(rows)
    assert csv_text.splitlines()[0] == 'Input,"Shape (R,l,N)",MDD,ACD,SD,KD,ED,DTW'
