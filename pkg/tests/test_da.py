import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsgeval import da
from tsgeval.errors import DegenerateError, ShapeError, SplitError
from tsgeval.measures import MEASURES, MeasureConfig


def domain(rng, n_src=90, n_hist=10, n_gt=60, l=6, N=2, shift=0.0):
    return da.DomainData(rng.normal(size=(n_src, l, N)),
                         rng.normal(loc=shift, size=(n_hist, l, N)),
                         rng.normal(loc=shift, size=(n_gt, l, N)),
                         source_name="User 14", target_name="User 0")


def _rows(t):
    flat = t.reshape(t.shape[0], -1)
    return sorted(map(tuple, flat.tolist()))


def test_sizes(rng):
    d = da.DomainData(rng.normal(size=(900, 4, 2)), rng.normal(size=(100, 4, 2)),
                      rng.normal(size=(900, 4, 2)))
    assert da.build_single(d).training_set.shape[0] == 900
    assert da.build_cross(d).training_set.shape[0] == 1000
    assert da.build_reference(d).training_set.shape[0] == 100


def test_shape_mismatch(rng):
    with pytest.raises(ShapeError):
        da.DomainData(rng.normal(size=(5, 4, 2)), rng.normal(size=(2, 4, 3)),
                      rng.normal(size=(5, 4, 3)))


def test_empty_history(rng):
    d = da.DomainData(rng.normal(size=(5, 4, 2)), np.empty((0, 4, 2)), rng.normal(size=(5, 4, 2)))
    assert da.build_single(d).training_set.shape[0] == 5
    with pytest.raises(DegenerateError):
        da.build_cross(d)
    with pytest.raises(DegenerateError):
        da.build_reference(d)


def test_cross_is_union(rng):
    d = domain(rng)
    cross = da.build_cross(d, seed=3)
    assert _rows(cross.training_set) == sorted(_rows(d.source_train) + _rows(d.target_hist))
    ref = da.build_reference(d)
    assert len(_rows(cross.training_set)) - len(_rows(ref.training_set)) == len(d.source_train)


@pytest.mark.parametrize("R,frac,sizes", [(1000, 0.1, (100, 900)), (3, 0.5, (1, 2)),
                                          (10, 0.999, (9, 1))])
def test_split_domain(R, frac, sizes):
    t = np.arange(R * 2.0).reshape(R, 2, 1)
    his, gt = da.split_domain(t, frac, seed=1)
    assert (his.shape[0], gt.shape[0]) == sizes
    assert _rows(np.concatenate([his, gt])) == _rows(t)


def test_split_domain_empty_side():
    with pytest.raises(SplitError):
        da.split_domain(np.ones((10, 2, 1)), 0.05)


def test_presets():
    assert da.PRESETS["HAPT"]["source"] == "14"
    assert da.PRESETS["HAPT"]["targets"] == ["0", "23", "18", "52", "20"]
    assert da.PRESETS["Air"]["source"] == "TJ" and da.PRESETS["Air"]["targets"] == ["BJ", "GZ", "SZ"]
    assert da.PRESETS["Boiler"]["source"] == "1" and da.PRESETS["Boiler"]["targets"] == ["2", "3"]


def test_evaluate_identity_and_shift(rng):
    d = domain(rng)
    cfg = MeasureConfig(repeats=1)
    reports = [da.evaluate_da(d.target_gt, da.build(k, d), cfg) for k in da.KINDS]
    for rep in reports:
        assert all(rep.entries[m] == (0.0, 0.0) for m in MEASURES)
    far = rng.normal(loc=5.0, scale=3.0, size=d.target_gt.shape)
    near = d.target_gt + rng.normal(scale=0.01, size=d.target_gt.shape)
    scen = da.build_single(d)
    far_rep, near_rep = da.evaluate_da(far, scen, cfg), da.evaluate_da(near, scen, cfg)
    for m in ("MDD", "ED", "DTW"):
        assert far_rep.mean(m) > near_rep.mean(m) > 0


def test_evaluation_independent_of_kind(rng):
    d = domain(rng)
    gen = rng.normal(size=d.target_gt.shape)
    cfg = MeasureConfig(repeats=1)
    dumps = {da.evaluate_da(gen, da.build(k, d), cfg).to_json() for k in da.KINDS}
    assert len(dumps) == 1


def test_evaluate_shape_mismatch(rng):
    d = domain(rng)
    with pytest.raises(ShapeError):
        da.evaluate_da(np.ones((4, 7, 2)), da.build_single(d))


def test_manifest_round_trip(tmp_path):
    m = da.write_manifest(tmp_path / "m.json", kind="cross", source_name="TJ", target_name="BJ",
                          training_path="training_cross.tsgt", gt_path="target_gt.tsgt",
                          hist_fraction=0.1, seeds={"split": 0})
    assert da.read_manifest(tmp_path / "m.json") == m


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 40), st.integers(1, 15), st.integers(0, 20), st.integers(0, 2**31))
def test_prop_size_identities(n_src, n_hist, extra_gt, seed):
    r = np.random.default_rng(seed)
    d = da.DomainData(r.normal(size=(n_src, 3, 2)), r.normal(size=(n_hist, 3, 2)),
                      r.normal(size=(n_hist + 1 + extra_gt, 3, 2)))
    assert da.build_single(d).training_set.shape[0] == n_src
    assert da.build_cross(d, seed).training_set.shape[0] == n_src + n_hist
    assert da.build_reference(d).training_set.shape[0] == n_hist
