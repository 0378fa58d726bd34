"""Greedy non-maximum suppression on axis-aligned or inclined boxes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from rotdet.geometry import AABB, RotRect, aabb_iou, enclosing_aabb, rotated_iou

DEFAULT_NMS_IOU = 0.3


@dataclass(frozen=True)
class Detection:
    """An inclined box, its associated axis-aligned box, and a confidence."""

    inclined: RotRect
    axis_aligned: AABB
    score: float

    def __post_init__(self):
        if not (0.0 <= self.score <= 1.0) or math.isnan(self.score):
            raise ValueError(f"score must lie in [0, 1], got {self.score}")

    @classmethod
    def from_rotrect(cls, r: RotRect, score: float = 1.0) -> "Detection":
        return cls(r, enclosing_aabb(r), score)

    def is_consistent(self, tol: float = 1.0) -> bool:
        """Whether ``axis_aligned`` is within ``tol`` pixels of the inclined box's extent."""
        e = enclosing_aabb(self.inclined)
        return all(abs(a - b) <= tol for a, b in zip(e.corners(), self.axis_aligned.corners()))


def score_order(dets: Sequence[Detection]) -> list[int]:
    """Indices by descending score, lower index first on ties."""
    return sorted(range(len(dets)), key=lambda i: (-dets[i].score, i))


def _greedy(n_order: list[int], overlap: Callable[[int, int], float], iou_thresh: float) -> list[int]:
    suppressed = set()
    keep = []
    for pos, i in enumerate(n_order):
        if i in suppressed:
            continue
        keep.append(i)
        for j in n_order[pos + 1 :]:
            if j not in suppressed and overlap(i, j) > iou_thresh:
                suppressed.add(j)
    return keep


def _check_thresh(t: float):
    if not (0.0 <= t <= 1.0):
        raise ValueError(f"iou_thresh must lie in [0, 1], got {t}")


def nms_axis_aligned(dets: Sequence[Detection], iou_thresh: float = DEFAULT_NMS_IOU) -> list[int]:
    """Kept original indices, in keep order, suppressing on axis-aligned IoU."""
    _check_thresh(iou_thresh)
    boxes = [d.axis_aligned for d in dets]
    return _greedy(score_order(dets), lambda i, j: aabb_iou(boxes[i], boxes[j]), iou_thresh)


def nms_inclined(dets: Sequence[Detection], iou_thresh: float = DEFAULT_NMS_IOU) -> list[int]:
    """Kept original indices, in keep order, suppressing on rotated IoU."""
    _check_thresh(iou_thresh)
    rects = [d.inclined for d in dets]
    return _greedy(score_order(dets), lambda i, j: rotated_iou(rects[i], rects[j]), iou_thresh)


def nms(dets: Sequence[Detection], iou_thresh: float = DEFAULT_NMS_IOU, mode: str = "inclined") -> list[int]:
    if mode == "inclined":
        return nms_inclined(dets, iou_thresh)
    if mode == "axis_aligned":
        return nms_axis_aligned(dets, iou_thresh)
    raise ValueError(f"unknown NMS mode {mode!r}")
