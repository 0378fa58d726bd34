"""ICDAR 2013/2015 annotation and submission files, training-box generation,
and label-space rotation augmentation.

Line formats
------------
ICDAR 2015 ground truth::

    x1,y1,x2,y2,x3,y3,x4,y4,transcription

The transcription is everything after the eighth comma, so it may contain
commas itself.  ``###`` marks a don't-care region.

ICDAR 2013 ground truth (lifted to an axis-aligned quad)::

    xmin, ymin, xmax, ymax, "transcription"

Detections::

    x1,y1,x2,y2,x3,y3,x4,y4[,score]

Files may start with a UTF-8 byte-order mark and use CRLF or LF line endings.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from rotdet.errors import ParseError
from rotdet.geometry import (
    AABB,
    EPS,
    Point2,
    Quad,
    RotRect,
    cos_sin_deg,
    enclosing_aabb,
    min_area_rect,
    rebase,
    rotate_point,
    shoelace_area,
)
from rotdet.nms import Detection

log = logging.getLogger(__name__)

DONT_CARE = "###"
DEFAULT_ROTATION_ANGLES = (-90, -75, -60, -45, -30, -15, 0, 15, 30, 45, 60, 75, 90)


@dataclass(frozen=True)
class GroundTruthEntry:
    quad: Quad
    transcription: str
    dont_care: bool = False

    def __post_init__(self):
        if self.dont_care != (self.transcription == DONT_CARE):
            raise ValueError("dont_care must be set exactly when the transcription is '###'")

    @classmethod
    def make(cls, quad: Quad, transcription: str) -> "GroundTruthEntry":
        return cls(quad, transcription, transcription == DONT_CARE)


@dataclass(frozen=True)
class TrainingBoxes:
    inclined: RotRect
    axis_aligned: AABB


def _fmt(v: float) -> str:
    """Integers without a decimal point, everything else round-trippable."""
    v = float(v)
    if v.is_integer():
        return str(int(v))
    return repr(v)


def _number(field: str, lineno: int, path) -> float:
    try:
        v = float(field.strip())
    except ValueError:
        raise ParseError(f"bad coordinate {field.strip()!r}", lineno, path) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite coordinate {field.strip()!r}", lineno, path)
    return v


def _try_numbers(fields: Sequence[str]) -> Optional[list[float]]:
    try:
        vals = [float(f.strip()) for f in fields]
    except ValueError:
        return None
    if not all(math.isfinite(v) for v in vals):
        return None
    return vals


def _quad_from_coords(coords: Sequence[float], lineno: int, path) -> Quad:
    pts = [(coords[i], coords[i + 1]) for i in range(0, 8, 2)]
    area = shoelace_area(pts)
    if area == 0:
        raise ParseError("quad has zero area", lineno, path)
    if area < 0:
        # Keep the labeled first point; walk the other three the opposite way.
        log.warning("%sline %d: counter-clockwise quad reversed to clockwise",
                    f"{path}:" if path else "", lineno)
        pts = [pts[0], pts[3], pts[2], pts[1]]
    try:
        return Quad(tuple(Point2(x, y) for x, y in pts))
    except ValueError as exc:
        raise ParseError(str(exc), lineno, path) from None


def _lines(content: str):
    if content.startswith("\ufeff"):
        content = content[1:]
    for lineno, line in enumerate(content.splitlines(), 1):
        line = line.rstrip("\r\n")
        if line.strip():
            yield lineno, line


def _parse_gt_line(line: str, lineno: int, path) -> GroundTruthEntry:
    parts = line.split(",", 8)
    if len(parts) >= 8:
        coords = _try_numbers(parts[:8])
        if coords is not None:
            text = parts[8] if len(parts) == 9 else ""
            return GroundTruthEntry.make(_quad_from_coords(coords, lineno, path), text)

    parts = line.split(",", 4)
    if len(parts) == 5:
        box = _try_numbers(parts[:4])
        rest = parts[4].strip()
        quoted = len(rest) >= 2 and rest[0] == '"' and rest[-1] == '"'
        if box is not None and (quoted or ("," not in rest and _try_numbers([rest]) is None)):
            xmin, ymin, xmax, ymax = box
            if xmax <= xmin or ymax <= ymin:
                raise ParseError("rectangle has non-positive extent", lineno, path)
            text = rest[1:-1] if quoted else rest
            quad = Quad.from_coords([xmin, ymin, xmax, ymin, xmax, ymax, xmin, ymax])
            return GroundTruthEntry.make(quad, text)

    n = len([p for p in line.split(",") if _try_numbers([p]) is not None])
    raise ParseError(
        f"expected 8 coordinates and a transcription (or an ICDAR 2013 box), "
        f"found {n} numeric fields",
        lineno,
        path,
    )


def parse_gt_file(content: str, path=None) -> list[GroundTruthEntry]:
    """Parse ICDAR 2015 (or 2013) ground truth text into entries."""
    return [_parse_gt_line(line, lineno, path) for lineno, line in _lines(content)]


def format_gt_file(entries: Sequence[GroundTruthEntry]) -> str:
    lines = [",".join([_fmt(c) for c in e.quad.coords()] + [e.transcription]) for e in entries]
    return "".join(line + "\n" for line in lines)


def _round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def write_detections(dets: Sequence[Detection], format: str = "quad") -> str:
    """Submission text: integer vertex coordinates, optionally followed by the score."""
    if format not in ("quad", "quad_score"):
        raise ValueError(f"unknown detection format {format!r}")
    lines = []
    for d in dets:
        fields = [str(_round_half_up(v)) for xy in d.inclined.corners() for v in xy]
        if format == "quad_score":
            fields.append(f"{d.score:.6f}")
        lines.append(",".join(fields))
    return "".join(line + "\n" for line in lines)


def _nearest_corner_rect(rect: RotRect, first: tuple[float, float]) -> RotRect:
    c = rect.corners()
    d = [math.hypot(x - first[0], y - first[1]) for x, y in c]
    best = min(d)
    scale = max(1.0, max(abs(v) for xy in c for v in xy))
    ties = [i for i, v in enumerate(d) if v - best <= EPS * scale]
    if len(ties) > 1:
        return rect
    return rebase(rect, ties[0])


def parse_detections(content: str, path=None) -> list[Detection]:
    dets = []
    for lineno, line in _lines(content):
        parts = line.split(",")
        if len(parts) not in (8, 9):
            raise ParseError(f"expected 8 coordinates and an optional score, got {len(parts)} fields",
                             lineno, path)
        coords = [_number(p, lineno, path) for p in parts[:8]]
        score = _number(parts[8], lineno, path) if len(parts) == 9 else 1.0
        if not 0.0 <= score <= 1.0:
            raise ParseError(f"score {score} outside [0, 1]", lineno, path)
        quad = _quad_from_coords(coords, lineno, path)
        rect = _nearest_corner_rect(min_area_rect(quad), quad.points()[0])
        dets.append(Detection(rect, enclosing_aabb(rect), score))
    return dets


def make_training_boxes(e: GroundTruthEntry) -> Optional[TrainingBoxes]:
    """Inclined and axis-aligned targets for a readable, multi-character word.

    The inclined box starts at the corner nearest the label's first point, so
    the labeled reading order survives; equidistant corners fall back to the
    geometric canonical order.
    """
    if e.dont_care or len(e.transcription) <= 1:
        return None
    rect = _nearest_corner_rect(min_area_rect(e.quad), e.quad.points()[0])
    return TrainingBoxes(rect, enclosing_aabb(rect))


def format_training_boxes(boxes: Sequence[tuple[TrainingBoxes, str]]) -> str:
    """``x1,y1,x2,y2,h,cx,cy,w,h,transcription`` per line."""
    lines = []
    for tb, text in boxes:
        vals = tb.inclined.as_tuple() + (
            tb.axis_aligned.cx,
            tb.axis_aligned.cy,
            tb.axis_aligned.w,
            tb.axis_aligned.h,
        )
        lines.append(",".join([_fmt(v) for v in vals] + [text]))
    return "".join(line + "\n" for line in lines)


def parse_training_boxes(content: str, path=None) -> list[tuple[TrainingBoxes, str]]:
    out = []
    for lineno, line in _lines(content):
        parts = line.split(",", 9)
        if len(parts) != 10:
            raise ParseError("expected 9 numbers and a transcription", lineno, path)
        v = [_number(p, lineno, path) for p in parts[:9]]
        try:
            tb = TrainingBoxes(RotRect.from_coords(*v[:5]), AABB(*v[5:9]))
        except ValueError as exc:
            raise ParseError(str(exc), lineno, path) from None
        out.append((tb, parts[9]))
    return out


def rotated_canvas(image_w: float, image_h: float, angle: float) -> tuple[float, float]:
    """Exact extent of a ``w x h`` image after rotation."""
    c, s = cos_sin_deg(angle)
    return (image_w * abs(c) + image_h * abs(s), image_w * abs(s) + image_h * abs(c))


def augment_rotate(
    entries: Sequence[GroundTruthEntry], image_w: int, image_h: int, angle: float
) -> tuple[list[GroundTruthEntry], int, int]:
    """Rotate labels with their image about its center onto an expanded canvas.

    Positive angles turn clockwise on screen.  The canvas grows to the rotated
    image's extent (rounded up) and quads are shifted so that extent starts at
    the origin.
    """
    ext_w, ext_h = rotated_canvas(image_w, image_h, angle)
    center = (image_w / 2.0, image_h / 2.0)
    shift_x = ext_w / 2.0 - center[0]
    shift_y = ext_h / 2.0 - center[1]
    out = []
    for e in entries:
        pts = []
        for p in e.quad.points():
            x, y = rotate_point(p, angle, center)
            pts.append(Point2(x + shift_x, y + shift_y))
        out.append(replace(e, quad=Quad(tuple(pts))))
    return out, math.ceil(ext_w - 1e-9), math.ceil(ext_h - 1e-9)
