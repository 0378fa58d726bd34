"""RPN anchor tiling and anchor-to-ground-truth assignment."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from rotdet.geometry import AABB

POSITIVE = "positive"
NEGATIVE = "negative"
IGNORE = "ignore"

# IoUs this close count as tied; mirrored anchors give equal overlaps that
# differ only by rounding.
TIE_TOL = 1e-12


@dataclass(frozen=True)
class AnchorConfig:
    """Anchor shapes per feature cell.

    ``scales`` multiply ``base_size``; ``ratios`` are height / width.  The
    defaults are the four-scale text setting with the standard aspect ratios.
    """

    scales: tuple[float, ...] = (4.0, 8.0, 16.0, 32.0)
    ratios: tuple[float, ...] = (0.5, 1.0, 2.0)
    base_size: float = 16.0
    stride: float = 16.0

    def __post_init__(self):
        object.__setattr__(self, "scales", tuple(float(s) for s in self.scales))
        object.__setattr__(self, "ratios", tuple(float(r) for r in self.ratios))
        if not self.scales or not self.ratios:
            raise ValueError("scales and ratios must be non-empty")
        if min(self.scales) <= 0 or min(self.ratios) <= 0:
            raise ValueError("scales and ratios must be positive")
        if self.base_size <= 0 or self.stride <= 0:
            raise ValueError("base_size and stride must be positive")

    @property
    def anchors_per_cell(self) -> int:
        return len(self.scales) * len(self.ratios)


@dataclass(frozen=True)
class AnchorAssignment:
    label: str
    matched_gt: Optional[int]
    max_iou: float


def cell_anchor_shapes(cfg: AnchorConfig) -> list[tuple[float, float]]:
    """(w, h) of each anchor in a cell, scale-major then ratio."""
    shapes = []
    for s in cfg.scales:
        side = s * cfg.base_size
        for r in cfg.ratios:
            sr = math.sqrt(r)
            shapes.append((side / sr, side * sr))
    return shapes


def generate_anchors(cfg: AnchorConfig, grid_h: int, grid_w: int) -> list[AABB]:
    """Anchors centred on every feature cell, row-major over cells."""
    if grid_h <= 0 or grid_w <= 0:
        raise ValueError("grid dimensions must be positive")
    shapes = cell_anchor_shapes(cfg)
    anchors = []
    for i in range(grid_h):
        cy = (i + 0.5) * cfg.stride
        for j in range(grid_w):
            cx = (j + 0.5) * cfg.stride
            anchors.extend(AABB(cx, cy, w, h) for w, h in shapes)
    return anchors


def inside_image(anchor: AABB, image_w: float, image_h: float, allowed_border: float = 0.0) -> bool:
    """True if the anchor lies within the image, up to ``allowed_border`` pixels outside."""
    return (
        anchor.x1 >= -allowed_border
        and anchor.y1 >= -allowed_border
        and anchor.x2 <= image_w + allowed_border
        and anchor.y2 <= image_h + allowed_border
    )


def iou_matrix(boxes_a: Sequence[AABB], boxes_b: Sequence[AABB]) -> np.ndarray:
    """Pairwise axis-aligned IoU, shape (len(a), len(b))."""
    if not boxes_a or not boxes_b:
        return np.zeros((len(boxes_a), len(boxes_b)))
    a = np.array([b.corners() for b in boxes_a])
    b = np.array([b.corners() for b in boxes_b])
    area_a = np.array([x.area for x in boxes_a])
    area_b = np.array([x.area for x in boxes_b])
    iw = np.minimum(a[:, None, 2], b[None, :, 2]) - np.maximum(a[:, None, 0], b[None, :, 0])
    ih = np.minimum(a[:, None, 3], b[None, :, 3]) - np.maximum(a[:, None, 1], b[None, :, 1])
    inter = np.where((iw > 0) & (ih > 0), iw * ih, 0.0)
    return inter / (area_a[:, None] + area_b[None, :] - inter)


def _first_max(m: np.ndarray, axis: int) -> np.ndarray:
    """Lowest index within ``TIE_TOL`` of the maximum along ``axis``."""
    near = m >= m.max(axis=axis, keepdims=True) - TIE_TOL
    return near.argmax(axis=axis)


def assign_anchors(
    anchors: Sequence[AABB],
    gts: Sequence[AABB],
    pos_thresh: float = 0.7,
    neg_thresh: float = 0.3,
) -> list[AnchorAssignment]:
    """Label anchors positive / negative / ignore against ground-truth boxes.

    An anchor is positive if its best IoU reaches ``pos_thresh``, or if it is
    the best anchor (lowest index on ties, which are IoUs within ``TIE_TOL``) for some ground truth it overlaps.
    Anchors positive only through the second rule are matched to the ground
    truth that selected them.
    """
    if not (0.0 <= neg_thresh <= pos_thresh <= 1.0):
        raise ValueError("need 0 <= neg_thresh <= pos_thresh <= 1")
    n = len(anchors)
    if not gts:
        return [AnchorAssignment(NEGATIVE, None, 0.0) for _ in range(n)]

    ious = iou_matrix(anchors, gts)
    best_gt = _first_max(ious, axis=1)
    max_iou = ious.max(axis=1)

    forced: dict[int, int] = {}
    for g, a in enumerate(_first_max(ious, axis=0)):
        a = int(a)
        if ious[a, g] > 0 and a not in forced:
            forced[a] = g

    out = []
    for i in range(n):
        m = float(max_iou[i])
        if m >= pos_thresh:
            out.append(AnchorAssignment(POSITIVE, int(best_gt[i]), m))
        elif i in forced:
            out.append(AnchorAssignment(POSITIVE, forced[i], m))
        elif m <= neg_thresh:
            out.append(AnchorAssignment(NEGATIVE, None, m))
        else:
            out.append(AnchorAssignment(IGNORE, None, m))
    return out
