"""Why suppression on axis-aligned boxes fails for tilted, tightly packed text.

Runs the committed two-bar fixture through postprocessing with both NMS
variants and optionally writes an SVG of the result.

    python3 scripts/parallel_bars_demo.py [--svg bars.svg]
"""

import argparse
from pathlib import Path

from rotdet.geometry import aabb_iou, rotated_iou
from rotdet.pipeline import PostprocessConfig, load_fixtures, postprocess
from rotdet.render import render_svg

FIXTURE = Path(__file__).resolve().parent.parent / "tests" / "data" / "parallel_bars"


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--fixture", default=str(FIXTURE))
    ap.add_argument("--nms-iou", type=float, default=0.3)
    ap.add_argument("--svg")
    args = ap.parse_args()

    d = Path(args.fixture)
    props, logits, deltas = load_fixtures(*[(d / f).read_text() for f in ("proposals.txt", "logits.txt", "deltas.txt")])
    everything = postprocess(props, logits, deltas, PostprocessConfig(nms_iou=1.0)).detections
    a, b = everything[:2]
    print(f"axis-aligned IoU {aabb_iou(a.axis_aligned, b.axis_aligned):.3f}")
    print(f"rotated IoU      {rotated_iou(a.inclined, b.inclined):.3f}")
    for mode in ("axis_aligned", "inclined"):
        kept = postprocess(props, logits, deltas, PostprocessConfig(nms_iou=args.nms_iou, nms_mode=mode))
        print(f"{mode:>12} NMS @ {args.nms_iou}: keeps {len(kept.detections)} of {len(everything)}")
    if args.svg:
        Path(args.svg).write_text(render_svg(260, 260, (), everything))
        print(f"wrote {args.svg}")


if __name__ == "__main__":
    main()
