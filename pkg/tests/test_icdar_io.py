import logging
import math

import numpy as np
import pytest

from conftest import DATA, random_rotrect
from rotdet.errors import ParseError
from rotdet.geometry import AABB, Quad, RotRect, shoelace_area
from rotdet.icdar_io import (
    DEFAULT_ROTATION_ANGLES,
    GroundTruthEntry,
    augment_rotate,
    format_gt_file,
    format_training_boxes,
    make_training_boxes,
    parse_detections,
    parse_gt_file,
    parse_training_boxes,
    write_detections,
)
from rotdet.nms import Detection

ICDAR = DATA / "icdar"


def _text(name):
    return (ICDAR / name).read_bytes().decode("utf-8")


def expected_ic15_sample():
    q = Quad.from_coords
    return [
        GroundTruthEntry.make(q([377, 117, 463, 117, 465, 130, 378, 130]), "Genaxis Theatre"),
        GroundTruthEntry.make(q([493, 115, 519, 115, 519, 131, 493, 131]), "[06]"),
        GroundTruthEntry.make(q([374, 155, 409, 155, 409, 170, 374, 170]), "###"),
        GroundTruthEntry.make(q([492, 151, 551, 151, 551, 170, 492, 170]), "Hello, World"),
        GroundTruthEntry.make(q([100, 200, 300, 200, 300, 240, 100, 240]), "reversed"),
    ]


def test_sample_file_has_awkward_bytes():
    raw = (ICDAR / "gt_ic15_sample.txt").read_bytes()
    assert raw.startswith(b"\xef\xbb\xbf") and b"\r\n" in raw


def test_parse_ic15_sample(caplog):
    with caplog.at_level(logging.WARNING):
        got = parse_gt_file(_text("gt_ic15_sample.txt"), path="gt_ic15_sample.txt")
    assert got == expected_ic15_sample()
    assert [e.dont_care for e in got] == [False, False, True, False, False]
    assert any("line 5" in r.getMessage() for r in caplog.records)


def test_parse_ic13_sample():
    got = parse_gt_file(_text("gt_ic13_sample.txt"))
    assert [e.transcription for e in got] == ["Tiredness", "kills", "A"]
    assert got[0].quad.coords() == (38, 43, 920, 43, 920, 215, 38, 215)


def test_parse_single_line():
    e, = parse_gt_file("0,0,10,0,10,4,0,4,word\n")
    assert e.quad.coords() == (0, 0, 10, 0, 10, 4, 0, 4) and e.transcription == "word"
    e, = parse_gt_file("0,0,10,0,10,4,0,4,###")
    assert e.dont_care


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as ei:
        parse_gt_file(_text("gt_bad_short.txt"), path="bad.txt")
    assert ei.value.line == 1 and ei.value.path == "bad.txt"
    with pytest.raises(ParseError) as ei:
        parse_gt_file("0,0,10,0,10,4,0,4,ok\n0,0,1,1,2,2,3,3,flat\n")
    assert ei.value.line == 2
    with pytest.raises(ParseError):
        parse_gt_file("0,0,10,4,10,0,0,4,bowtie\n")


def test_gt_format_round_trip():
    entries = expected_ic15_sample()
    assert parse_gt_file(format_gt_file(entries)) == entries


def test_write_detections_examples():
    d = Detection.from_rotrect(RotRect.from_coords(0, 0, 10, 0, 4), 0.5)
    assert write_detections([d], "quad") == "0,0,10,0,10,4,0,4\n"
    assert write_detections([d], "quad_score") == "0,0,10,0,10,4,0,4,0.500000\n"
    half = Detection.from_rotrect(RotRect.from_coords(0.5, 1.5, 10.5, 1.5, 4), 1.0)
    assert write_detections([half]) == "1,2,11,2,11,6,1,6\n"
    assert write_detections([]) == ""


def test_parse_detections_examples():
    d, = parse_detections("0,0,10,0,10,4,0,4\n")
    assert d.score == 1.0
    assert d.inclined.as_tuple() == (0, 0, 10, 0, 4)
    assert d.axis_aligned == AABB(5, 2, 10, 4)
    d, = parse_detections("0,0,10,0,10,4,0,4,0.25\n")
    assert d.score == 0.25
    with pytest.raises(ParseError):
        parse_detections("0,0,10,0,10,4,0,4,1.5\n")


def test_written_vertices_within_rounding_of_corners():
    rng = np.random.default_rng(50)
    for _ in range(2000):
        r = random_rotrect(rng, 500, (3, 300))
        text = write_detections([Detection.from_rotrect(r, 0.5)], "quad_score")
        ints = [int(v) for v in text.split(",")[:8]]
        assert max(abs(a - b) for a, b in zip(ints, (v for p in r.corners() for v in p))) <= 0.5


def test_integer_rectangles_round_trip_exactly():
    rng = np.random.default_rng(51)
    for _ in range(200):
        x, y = rng.integers(-100, 100, 2)
        w, h = rng.integers(1, 80, 2)
        r = RotRect.from_coords(x, y, x + w, y, h)
        d, = parse_detections(write_detections([Detection.from_rotrect(r, 0.75)], "quad_score"))
        assert d.inclined.as_tuple() == r.as_tuple() and d.score == 0.75


def test_training_boxes():
    rect = Quad.from_coords([0, 0, 10, 0, 10, 4, 0, 4])
    assert make_training_boxes(GroundTruthEntry.make(rect, "###")) is None
    assert make_training_boxes(GroundTruthEntry.make(rect, "a")) is None
    tb = make_training_boxes(GroundTruthEntry.make(rect, "ab"))
    assert tb.inclined.as_tuple() == (0, 0, 10, 0, 4)
    assert tb.axis_aligned == AABB(5, 2, 10, 4)
    text = format_training_boxes([(tb, "ab, cd")])
    assert text == "0,0,10,0,4,5,2,10,4,ab, cd\n"
    assert parse_training_boxes(text) == [(tb, "ab, cd")]


def test_training_box_starts_at_labelled_first_point():
    # labelled from the bottom-right corner
    q = Quad.from_coords([10, 4, 0, 4, 0, 0, 10, 0])
    tb = make_training_boxes(GroundTruthEntry.make(q, "word"))
    assert (tb.inclined.p1.x, tb.inclined.p1.y) == (10, 4)


def test_augment_zero_is_identity():
    entries = expected_ic15_sample()
    out, w, h = augment_rotate(entries, 1280, 720, 0)
    assert out == entries and (w, h) == (1280, 720)


def test_augment_quarter_turn_swaps_canvas():
    entries = [GroundTruthEntry.make(Quad.from_coords([0, 0, 10, 0, 10, 4, 0, 4]), "ab")]
    out, w, h = augment_rotate(entries, 1280, 720, 90)
    assert (w, h) == (720, 1280)
    # clockwise on screen: top-left corner lands at the top-right of the new canvas
    assert out[0].quad.points()[0] == (720, 0)
    assert sorted(out[0].quad.points()) == [(716, 0), (716, 10), (720, 0), (720, 10)]


def test_augment_inverse_and_area():
    entries = expected_ic15_sample()
    for angle in DEFAULT_ROTATION_ANGLES:
        out, w, h = augment_rotate(entries, 1280, 720, angle)
        assert [e.transcription for e in out] == [e.transcription for e in entries]
        assert [e.dont_care for e in out] == [e.dont_care for e in entries]
        for a, b in zip(entries, out):
            assert abs(b.quad.area - a.quad.area) <= 1e-6 * a.quad.area
            assert shoelace_area(b.quad.points()) > 0
    # +30 then -30 is the identity up to the canvas offset, one translation for every vertex
    fwd, w, h = augment_rotate(entries, 1280, 720, 30)
    back, _, _ = augment_rotate(fwd, w, h, -30)
    x0, y0 = entries[0].quad.points()[0]
    x1, y1 = back[0].quad.points()[0]
    dx, dy = x1 - x0, y1 - y0
    for a, b in zip(entries, back):
        for (ax, ay), (bx, by) in zip(a.quad.points(), b.quad.points()):
            assert abs(bx - ax - dx) < 1e-9 and abs(by - ay - dy) < 1e-9
