"""Regenerate the committed test fixtures under tests/data.

    python3 scripts/make_fixtures.py [--out tests/data]

Inputs are drawn from a fixed seed; golden outputs are produced by the same
code paths the CLI uses, so rerunning after an intentional behaviour change
refreshes them.
"""

import argparse
import json
import math
from pathlib import Path

import numpy as np

from rotdet.boxcodec import encode_aabb, encode_inclined
from rotdet.cli import evaluate_corpus, main as cli_main
from rotdet.geometry import AABB, Point2, Quad, RotRect, enclosing_aabb
from rotdet.icdar_io import (
    GroundTruthEntry,
    format_gt_file,
    make_training_boxes,
    parse_detections,
    parse_gt_file,
)
from rotdet.pipeline import format_records
from rotdet.render import render_svg

SEED = 2017


def write_fixture(d: Path, proposals, logits, deltas):
    d.mkdir(parents=True, exist_ok=True)
    (d / "proposals.txt").write_text("# cx cy w h\n" + format_records(proposals))
    (d / "logits.txt").write_text("# background text\n" + format_records(logits))
    (d / "deltas.txt").write_text("# vx vy vw vh ux1 uy1 ux2 uy2 uh\n" + format_records(deltas))


def record(prop_box, rect, box=None, noise=None):
    box = enclosing_aabb(rect) if box is None else box
    v = encode_aabb(prop_box, box).as_tuple()
    u = encode_inclined(prop_box, rect).as_tuple()
    vals = np.array(v + u)
    if noise is not None:
        vals = vals + noise
    return (prop_box.cx, prop_box.cy, prop_box.w, prop_box.h), tuple(float(x) for x in vals)


def parallel_bars(out: Path):
    """Two long 45-degree bars with a 2 px gap: big AABB overlap, no real overlap."""
    s = 1 / math.sqrt(2)
    a = RotRect.from_coords(100, 100, 100 + 100 * s, 100 + 100 * s, 10)
    b = RotRect.from_coords(100 - 12 * s, 100 + 12 * s, 100 + 88 * s, 100 + 112 * s, 10)
    props, deltas = [], []
    for r in (a, b):
        box = enclosing_aabb(r)
        p, d = record(box, r)
        props.append(p)
        deltas.append(d)
    write_fixture(out / "parallel_bars", props, [(0.0, 3.0), (0.0, 2.0)], deltas)


def target(entry):
    """Regression target along the reading direction, as used for training."""
    return make_training_boxes(GroundTruthEntry.make(entry.quad, "target")).inclined


def text_rect(rng, cx, cy):
    w, h = rng.uniform(60, 160), rng.uniform(14, 30)
    ang = rng.uniform(-40, 40)
    ux, uy = math.cos(math.radians(ang)), math.sin(math.radians(ang))
    x1 = cx - ux * w / 2 + uy * h / 2
    y1 = cy - uy * w / 2 - ux * h / 2
    return RotRect(Point2(x1, y1), Point2(x1 + ux * w, y1 + uy * w), h)


def end_to_end(out: Path, rng):
    """20 proposals over one 640x480 image.

    Gts 0-3 get three jittered proposals each, the don't-care region two, gt 4
    a single low-scoring one; three confident proposals hit empty space and two
    are background.
    """
    d = out / "e2e"
    centers = [(120, 90), (420, 100), (150, 300), (470, 330), (300, 420), (300, 220)]
    rects = [text_rect(rng, *c) for c in centers]
    words = ["STOP", "Market", "exit", "Café, bar", "open", "###"]
    entries = []
    for r, w in zip(rects, words):
        pts = [(round(x), round(y)) for x, y in r.corners()]
        entries.append(GroundTruthEntry.make(Quad(tuple(Point2(*p) for p in pts)), w))

    props, logits, deltas = [], [], []

    def add(prop, target, logit, noise_sd=0.01):
        p, dl = record(prop, target, noise=rng.normal(0, noise_sd, 9))
        props.append(p)
        logits.append(logit)
        deltas.append(dl)

    def jitter_box(r):
        b = enclosing_aabb(r)
        return AABB(b.cx + rng.normal(0, 4), b.cy + rng.normal(0, 4), b.w * rng.uniform(0.85, 1.15),
                    b.h * rng.uniform(0.85, 1.15))

    for g in range(4):
        for _ in range(3):
            add(jitter_box(rects[g]), target(entries[g]), (0.0, float(rng.uniform(1.0, 4.0))))
    for _ in range(2):
        add(jitter_box(rects[5]), target(entries[5]), (0.0, float(rng.uniform(1.0, 4.0))))
    add(jitter_box(rects[4]), target(entries[4]), (0.5, -0.5))
    for c in [(560, 40), (40, 440), (600, 200)]:
        r = text_rect(rng, *c)
        add(jitter_box(r), r, (0.0, float(rng.uniform(0.5, 2.0))))
    for c in [(250, 40), (560, 440)]:
        r = text_rect(rng, *c)
        add(jitter_box(r), r, (2.0, -1.0))
    assert len(props) == 20

    write_fixture(d, props, logits, deltas)
    (d / "gt").mkdir(exist_ok=True)
    (d / "gt" / "gt_img_1.txt").write_text(format_gt_file(entries))
    (d / "det").mkdir(exist_ok=True)
    det_path = d / "det" / "res_img_1.txt"
    cli_main(["postprocess", "--proposals", str(d / "proposals.txt"), "--logits", str(d / "logits.txt"),
              "--deltas", str(d / "deltas.txt"), "-o", str(det_path)])
    report = evaluate_corpus(d / "det", d / "gt", 0.5, 0.5)
    (d / "golden_report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return entries, det_path


def render_golden(out: Path, entries, det_path: Path):
    dets = parse_detections(det_path.read_text())
    (out / "render").mkdir(exist_ok=True)
    (out / "render" / "golden.svg").write_text(render_svg(640, 480, entries, dets))


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "tests" / "data"))
    args = ap.parse_args()
    out = Path(args.out)
    rng = np.random.default_rng(SEED)
    parallel_bars(out)
    entries, det_path = end_to_end(out, rng)
    render_golden(out, parse_gt_file((out / "e2e" / "gt" / "gt_img_1.txt").read_text()), det_path)
    print(f"fixtures written under {out}")


if __name__ == "__main__":
    main()
