import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import naive_roi_pool
from rotdet.errors import EmptyRoi, ParseError
from rotdet.geometry import AABB
from rotdet.roipool import (
    FeatureMap,
    format_feature_map,
    multi_pool_concat,
    parse_feature_map,
    roi_pool,
)

POOL_SIZES = [(7, 7), (11, 3), (3, 11)]


def test_constant_map():
    fm = FeatureMap(np.full((3, 10, 12), 2.5), stride=4)
    out = roi_pool(fm, AABB(20, 18, 17, 9), 7, 7)
    assert out.data.shape == (3, 7, 7)
    assert np.all(out.data == 2.5)
    vec = multi_pool_concat(fm, AABB(20, 18, 17, 9), POOL_SIZES)
    assert vec.shape == (3 * 115,)
    assert np.all(vec == 2.5)


def test_quadrants():
    fm = FeatureMap(np.arange(1, 17, dtype=float).reshape(1, 4, 4), stride=1)
    out = roi_pool(fm, AABB(2, 2, 4, 4), 2, 2)
    assert out.data.ravel().tolist() == [6, 8, 14, 16]


def test_single_cell_roi():
    data = np.random.default_rng(0).normal(size=(2, 5, 5))
    fm = FeatureMap(data, stride=16)
    out = roi_pool(fm, AABB(16 * 2.5, 16 * 3.5, 16, 16), 7, 7)
    assert np.all(out.data[0] == data[0, 3, 2])
    assert np.all(out.data[1] == data[1, 3, 2])


def test_concat_length_and_single_size():
    fm = FeatureMap(np.random.default_rng(1).normal(size=(1, 20, 20)), stride=8)
    roi = AABB(60, 70, 50, 40)
    assert multi_pool_concat(fm, roi, POOL_SIZES).shape == (115,)
    assert np.array_equal(multi_pool_concat(fm, roi, [(7, 7)]), roi_pool(fm, roi, 7, 7).data.ravel())


def test_concat_block_permutation():
    fm = FeatureMap(np.random.default_rng(2).normal(size=(2, 20, 20)), stride=8)
    roi = AABB(60, 70, 50, 40)
    blocks = {s: roi_pool(fm, roi, *s).data.ravel() for s in POOL_SIZES}
    perm = [POOL_SIZES[2], POOL_SIZES[0], POOL_SIZES[1]]
    assert np.array_equal(multi_pool_concat(fm, roi, perm), np.concatenate([blocks[s] for s in perm]))


def test_empty_roi():
    fm = FeatureMap(np.ones((1, 4, 4)), stride=1)
    with pytest.raises(EmptyRoi):
        roi_pool(fm, AABB(-10, -10, 2, 2), 2, 2)


def _random_case(rng):
    c, h, w = rng.integers(1, 4), rng.integers(1, 25), rng.integers(1, 25)
    stride = float(rng.choice([1, 4, 8, 16]))
    data = rng.normal(size=(c, h, w))
    x1 = rng.uniform(-0.2 * w, w) * stride
    y1 = rng.uniform(-0.2 * h, h) * stride
    x2 = x1 + rng.uniform(0.1, w) * stride
    y2 = y1 + rng.uniform(0.1, h) * stride
    return data, stride, (x1, y1, x2, y2)


def test_matches_nested_loop_oracle():
    rng = np.random.default_rng(30)
    done = 0
    while done < 100:
        data, stride, (x1, y1, x2, y2) = _random_case(rng)
        ph, pw = rng.integers(1, 12, 2)
        fm = FeatureMap(data, stride)
        try:
            got = roi_pool(fm, AABB.from_corners(x1, y1, x2, y2), ph, pw).data
        except EmptyRoi:
            continue
        assert np.array_equal(got, naive_roi_pool(data, stride, x1, y1, x2, y2, ph, pw))
        done += 1


@given(st.integers(0, 10_000), st.floats(0.0, 5.0))
def test_monotone_in_feature_values(seed, bump):
    rng = np.random.default_rng(seed)
    data = rng.normal(size=(2, 9, 9))
    fm = FeatureMap(data, 4)
    roi = AABB(18, 18, 20, 14)
    before = multi_pool_concat(fm, roi)
    bumped = data.copy()
    bumped[rng.integers(2), rng.integers(9), rng.integers(9)] += bump
    after = multi_pool_concat(FeatureMap(bumped, 4), roi)
    assert np.all(after >= before)


def test_feature_map_text_round_trip():
    fm = FeatureMap(np.random.default_rng(3).normal(size=(2, 3, 4)), stride=16)
    back = parse_feature_map("# header comment\n" + format_feature_map(fm))
    assert back.stride == 16 and np.array_equal(back.data, fm.data)
    with pytest.raises(ParseError):
        parse_feature_map("1 2 2 1\n1 2 3\n")
    with pytest.raises(ParseError):
        parse_feature_map("1 2 2\n1 2 3 4\n")
