"""Command-line front end.

Subcommands: convert, postprocess, eval, augment, render, iou, nms.  Run
``rotdet <cmd> -h`` for flags.  Known input errors exit with status 2 and
print one JSON line ``{"error": ..., "message": ..., "path": ..., "line": ...}``
to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from rotdet.errors import (
    DecodeOverflow,
    DegenerateInput,
    EmptyRoi,
    FixtureMismatch,
    ParseError,
)
from rotdet.evaluation import (
    DEFAULT_DONTCARE_OVERLAP,
    DEFAULT_MATCH_IOU,
    EvalResult,
    aggregate,
    evaluate,
)
from rotdet.geometry import AABB, RotRect, aabb_iou, rotated_iou
from rotdet.icdar_io import (
    DEFAULT_ROTATION_ANGLES,
    augment_rotate,
    format_gt_file,
    format_training_boxes,
    make_training_boxes,
    parse_detections,
    parse_gt_file,
    write_detections,
)
from rotdet.nms import DEFAULT_NMS_IOU, nms
from rotdet.pipeline import PostprocessConfig, format_records, load_fixtures, postprocess
from rotdet.render import render_svg
from rotdet.roipool import parse_feature_map

log = logging.getLogger("rotdet")

KNOWN_ERRORS = (ParseError, FixtureMismatch, DegenerateInput, DecodeOverflow, EmptyRoi)


def _read(path) -> str:
    return Path(path).read_text(encoding="utf-8-sig")


def _emit(text: str, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _txt_files(d: Path) -> list[Path]:
    return sorted(p for p in d.iterdir() if p.is_file() and p.suffix == ".txt")


def image_key(path: Path) -> str:
    """Filename stem with a leading ``gt_`` / ``res_`` removed, for pairing."""
    stem = path.stem
    for prefix in ("gt_", "res_"):
        if stem.startswith(prefix):
            return stem[len(prefix):]
    return stem


def _pooled_sizes(text: str) -> tuple[tuple[int, int], ...]:
    sizes = []
    for item in text.split(","):
        h, _, w = item.strip().lower().partition("x")
        sizes.append((int(h), int(w)))
    return tuple(sizes)


def cmd_convert(args) -> int:
    outdir = Path(args.output) if args.output else None
    if outdir is None and len(args.gt) > 1:
        raise SystemExit("convert: -o/--output DIR is required for more than one file")
    if outdir is not None:
        outdir.mkdir(parents=True, exist_ok=True)
    for path in map(Path, args.gt):
        boxes = []
        for e in parse_gt_file(_read(path), path=str(path)):
            tb = make_training_boxes(e)
            if tb is not None:
                boxes.append((tb, e.transcription))
        text = format_training_boxes(boxes)
        _emit(text, None if outdir is None else outdir / path.name)
    return 0


def cmd_postprocess(args) -> int:
    cfg = PostprocessConfig(
        score_threshold=args.score_threshold,
        nms_iou=args.nms_iou,
        nms_mode=args.nms_mode,
        pooled_sizes=_pooled_sizes(args.pooled_sizes),
    )
    props, logits, deltas = load_fixtures(
        _read(args.proposals), _read(args.logits), _read(args.deltas),
        paths=(args.proposals, args.logits, args.deltas),
    )
    fm = parse_feature_map(_read(args.feature_map)) if args.feature_map else None
    result = postprocess(props, logits, deltas, cfg, feature_map=fm)
    if result.num_degenerate:
        print(f"warning: dropped {result.num_degenerate} degenerate detection(s)", file=sys.stderr)
    _emit(write_detections(result.detections, args.format), args.output)
    if args.pooled_out and result.pooled is not None:
        Path(args.pooled_out).write_text(format_records(result.pooled), encoding="utf-8")
    return 0


def evaluate_corpus(det_dir: Path, gt_dir: Path, match_iou: float, dontcare_overlap: float) -> dict:
    gt_files = {image_key(p): p for p in _txt_files(gt_dir)}
    det_files = {image_key(p): p for p in _txt_files(det_dir)} if det_dir.is_dir() else {}
    rows = []
    results = []
    for key in sorted(set(gt_files) | set(det_files)):
        gts = parse_gt_file(_read(gt_files[key]), path=str(gt_files[key])) if key in gt_files else []
        dets = (
            parse_detections(_read(det_files[key]), path=str(det_files[key]))
            if key in det_files
            else []
        )
        r = evaluate(dets, gts, match_iou, dontcare_overlap)
        results.append(r)
        rows.append({"image": key, **r.as_dict()})
    total = aggregate(results) if results else EvalResult(0, 0, 0)
    return {
        "match_iou": match_iou,
        "dontcare_overlap": dontcare_overlap,
        "images": rows,
        "total": total.as_dict(),
    }


def cmd_eval(args) -> int:
    report = evaluate_corpus(Path(args.det_dir), Path(args.gt_dir), args.match_iou, args.dontcare_overlap)
    _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.output)
    return 0


def cmd_augment(args) -> int:
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = []
    for path in _txt_files(Path(args.gt_dir)):
        entries = parse_gt_file(_read(path), path=str(path))
        for angle in args.angles:
            rotated, w, h = augment_rotate(entries, args.width, args.height, angle)
            name = f"{path.stem}_rot{angle:+g}{path.suffix}"
            (outdir / name).write_text(format_gt_file(rotated), encoding="utf-8")
            manifest.append({"file": name, "source": path.name, "angle": angle, "width": w, "height": h})
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_render(args) -> int:
    gts = [e for p in args.gt for e in parse_gt_file(_read(p), path=p)]
    dets = [d for p in args.det for d in parse_detections(_read(p), path=p)]
    _emit(render_svg(args.width, args.height, gts, dets), args.output)
    return 0


def _floats(text: str, n: int, what: str) -> list[float]:
    vals = [float(v) for v in text.replace(" ", "").split(",") if v]
    if len(vals) != n:
        raise ParseError(f"{what} needs {n} comma-separated numbers, got {len(vals)}")
    return vals


def cmd_iou(args) -> int:
    if args.aabb:
        a = AABB(*_floats(args.a, 4, "box"))
        b = AABB(*_floats(args.b, 4, "box"))
        value = aabb_iou(a, b)
    else:
        a = RotRect.from_coords(*_floats(args.a, 5, "rect"))
        b = RotRect.from_coords(*_floats(args.b, 5, "rect"))
        value = rotated_iou(a, b)
    print(f"{value:.10f}")
    return 0


def cmd_nms(args) -> int:
    dets = [d for p in args.detections for d in parse_detections(_read(p), path=p)]
    keep = nms(dets, args.iou, args.mode)
    if args.write:
        _emit(write_detections([dets[i] for i in keep], "quad_score"), args.output)
    else:
        _emit("".join(f"{i}\n" for i in keep), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rotdet", description=__doc__.split("\n\n")[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="ground-truth quads -> training boxes")
    p.add_argument("gt", nargs="+")
    p.add_argument("-o", "--output", help="output directory (stdout for a single file if omitted)")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("postprocess", help="fixture proposals/logits/deltas -> detections")
    p.add_argument("--proposals", required=True)
    p.add_argument("--logits", required=True)
    p.add_argument("--deltas", required=True)
    p.add_argument("--score-threshold", type=float, default=0.5)
    p.add_argument("--nms-iou", type=float, default=DEFAULT_NMS_IOU)
    p.add_argument("--nms-mode", choices=("inclined", "axis_aligned"), default="inclined")
    p.add_argument("--pooled-sizes", default="7x7,11x3,3x11")
    p.add_argument("--feature-map", help="feature map file; enables --pooled-out")
    p.add_argument("--pooled-out", help="write concatenated pooled features per proposal here")
    p.add_argument("--format", choices=("quad", "quad_score"), default="quad_score")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_postprocess)

    p = sub.add_parser("eval", help="precision/recall/F over a corpus")
    p.add_argument("det_dir")
    p.add_argument("gt_dir")
    p.add_argument("--match-iou", type=float, default=DEFAULT_MATCH_IOU)
    p.add_argument("--dontcare-overlap", type=float, default=DEFAULT_DONTCARE_OVERLAP)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("augment", help="rotate ground-truth labels")
    p.add_argument("gt_dir")
    p.add_argument("out_dir")
    p.add_argument("--angles", type=float, nargs="+", default=list(DEFAULT_ROTATION_ANGLES))
    p.add_argument("--width", type=int, default=1280)
    p.add_argument("--height", type=int, default=720)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("render", help="SVG overlay of ground truth and detections")
    p.add_argument("--gt", action="append", default=[])
    p.add_argument("--det", action="append", default=[])
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("iou", help="IoU of two boxes")
    p.add_argument("a", help="x1,y1,x2,y2,h (or cx,cy,w,h with --aabb)")
    p.add_argument("b")
    p.add_argument("--aabb", action="store_true")
    p.set_defaults(func=cmd_iou)

    p = sub.add_parser("nms", help="NMS over one or more detection files (merged in order)")
    p.add_argument("detections", nargs="+")
    p.add_argument("--iou", type=float, default=DEFAULT_NMS_IOU)
    p.add_argument("--mode", choices=("inclined", "axis_aligned"), default="inclined")
    p.add_argument("--write", action="store_true", help="print kept detections instead of indices")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_nms)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except KNOWN_ERRORS as exc:
        err = {
            "error": type(exc).__name__,
            "message": getattr(exc, "message", str(exc)),
            "path": getattr(exc, "path", None),
            "line": getattr(exc, "line", None),
        }
        print(json.dumps(err, sort_keys=True), file=sys.stderr)
        return 2
    except ValueError as exc:
        print(json.dumps({"error": "ValueError", "message": str(exc), "path": None, "line": None},
                         sort_keys=True), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
