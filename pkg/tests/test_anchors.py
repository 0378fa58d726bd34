import math

import numpy as np
import pytest

from oracles import brute_force_assign
from rotdet.anchors import (
    AnchorConfig,
    assign_anchors,
    generate_anchors,
    inside_image,
)
from rotdet.geometry import AABB


def test_twelve_anchors_per_cell():
    cfg = AnchorConfig(scales=(4, 8, 16, 32), ratios=(0.5, 1, 2))
    assert len(generate_anchors(cfg, 1, 1)) == 12


def test_single_anchor_geometry():
    a, = generate_anchors(AnchorConfig(scales=(8,), ratios=(1,), base_size=16, stride=16), 1, 1)
    assert a == AABB(8, 8, 128, 128)


def test_ratio_preserves_area():
    a, = generate_anchors(AnchorConfig(scales=(8,), ratios=(2,), base_size=16, stride=16), 1, 1)
    assert a.w == pytest.approx(128 / math.sqrt(2), abs=1e-9)
    assert a.h == pytest.approx(128 * math.sqrt(2), abs=1e-9)
    assert a.w * a.h == pytest.approx(128 ** 2, abs=1e-9)


@pytest.mark.parametrize("gh,gw", [(1, 1), (3, 5), (7, 2)])
def test_count_order_and_shapes(gh, gw):
    cfg = AnchorConfig(scales=(4, 8), ratios=(0.5, 1, 2), stride=8)
    anchors = generate_anchors(cfg, gh, gw)
    assert len(anchors) == gh * gw * 6
    for k, a in enumerate(anchors):
        cell, shape = divmod(k, 6)
        i, j = divmod(cell, gw)
        assert (a.cx, a.cy) == ((j + 0.5) * 8, (i + 0.5) * 8)
        s, r = cfg.scales[shape // 3], cfg.ratios[shape % 3]
        assert a.h / a.w == pytest.approx(r, abs=1e-9)
        assert a.w * a.h == pytest.approx((s * 16) ** 2)


def test_config_validation():
    with pytest.raises(ValueError):
        AnchorConfig(scales=())
    with pytest.raises(ValueError):
        AnchorConfig(ratios=(0,))


def test_inside_image_predicate():
    assert inside_image(AABB(50, 50, 20, 20), 100, 100)
    assert not inside_image(AABB(5, 50, 20, 20), 100, 100)
    assert inside_image(AABB(5, 50, 20, 20), 100, 100, allowed_border=5)


def test_assign_identical_and_disjoint():
    g = AABB(50, 50, 20, 10)
    out = assign_anchors([g, AABB(500, 500, 10, 10)], [g])
    assert (out[0].label, out[0].matched_gt, out[0].max_iou) == ("positive", 0, 1.0)
    assert (out[1].label, out[1].matched_gt, out[1].max_iou) == ("negative", None, 0.0)


def test_assign_empty_gts():
    out = assign_anchors([AABB(0, 0, 1, 1)] * 3, [])
    assert all(a.label == "negative" and a.max_iou == 0 for a in out)


def test_forced_positive_for_weak_gt():
    # best IoU is below the negative threshold, yet the gt still gets an anchor
    anchors = [AABB(0, 0, 10, 10), AABB(100, 100, 10, 10)]
    out = assign_anchors(anchors, [AABB(5, 5, 10, 10)])
    assert out[0].label == "positive" and out[0].matched_gt == 0
    assert out[0].max_iou < 0.3


def _random_scene(rng, n_anchors=100, n_gts=5):
    anchors = [AABB(*rng.uniform(0, 200, 2), *rng.uniform(5, 80, 2)) for _ in range(n_anchors)]
    gts = [AABB(*rng.uniform(0, 200, 2), *rng.uniform(5, 80, 2)) for _ in range(n_gts)]
    # plant near-copies so positives by threshold occur too
    for g in gts[:3]:
        anchors[rng.integers(n_anchors)] = AABB(g.cx + 1, g.cy - 1, g.w, g.h)
    return anchors, gts


def test_assign_matches_brute_force():
    rng = np.random.default_rng(20)
    for _ in range(30):
        anchors, gts = _random_scene(rng)
        got = assign_anchors(anchors, gts, 0.7, 0.3)
        want = brute_force_assign([a.corners() for a in anchors], [g.corners() for g in gts], 0.7, 0.3)
        for a, (label, g, m) in zip(got, want):
            assert (a.label, a.matched_gt) == (label, g)
            assert a.max_iou == pytest.approx(m, abs=1e-12)


def test_assign_invariants():
    rng = np.random.default_rng(21)
    for _ in range(30):
        anchors, gts = _random_scene(rng)
        out = assign_anchors(anchors, gts)
        assert out == assign_anchors(anchors, gts)
        for a in out:
            assert 0 <= a.max_iou <= 1
            if a.label == "positive":
                assert a.matched_gt is not None
        for g in range(len(gts)):
            overl = [a for a in anchors if _iou(a, gts[g]) > 0]
            if overl:
                assert any(a.label == "positive" for a in out)


def _iou(a, b):
    ix = max(0.0, min(a.x2, b.x2) - max(a.x1, b.x1))
    iy = max(0.0, min(a.y2, b.y2) - max(a.y1, b.y1))
    return ix * iy


def test_rounding_level_ties_go_to_lowest_index():
    # mirror images of each other around the gt; floats make the second look larger
    anchors = [AABB(0.1, 0.3, 0.7, 0.9), AABB(0.3, 0.3, 0.7, 0.9)]
    out = assign_anchors(anchors, [AABB(0.2, 0.3, 0.7, 0.9)], pos_thresh=0.8, neg_thresh=0.3)
    assert [a.label for a in out] == ["positive", "ignore"]
