"""Precision / recall / F-measure with don't-care handling.

Protocol, per image:

1. A detection whose overlap with don't-care regions, as a fraction of its own
   area, exceeds ``dontcare_overlap`` is discarded and not counted.
2. Don't-care ground truths are not counted.
3. Detections are visited by descending score (lower index first on ties);
   each one takes the still-unmatched counted ground truth of highest polygon
   IoU, provided that IoU exceeds ``match_iou``.

Corpus totals sum true positives and counts over images before computing the
ratios.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from rotdet.geometry import convex_intersection_area, shoelace_area
from rotdet.icdar_io import GroundTruthEntry
from rotdet.nms import Detection, score_order

DEFAULT_MATCH_IOU = 0.5
DEFAULT_DONTCARE_OVERLAP = 0.5


@dataclass
class EvalResult:
    true_positives: int
    num_detections_counted: int
    num_gt_counted: int
    matches: list[tuple[int, int]] = field(default_factory=list)

    @property
    def precision(self) -> float:
        if self.num_detections_counted == 0:
            return 0.0
        return self.true_positives / self.num_detections_counted

    @property
    def recall(self) -> float:
        if self.num_gt_counted == 0:
            return 0.0
        return self.true_positives / self.num_gt_counted

    @property
    def f_measure(self) -> float:
        # Harmonic mean of P and R, written so equal P and R give that value exactly.
        denom = self.num_detections_counted + self.num_gt_counted
        if self.true_positives == 0 or denom == 0:
            return 0.0
        return 2 * self.true_positives / denom

    def as_dict(self) -> dict:
        return {
            "true_positives": self.true_positives,
            "num_detections_counted": self.num_detections_counted,
            "num_gt_counted": self.num_gt_counted,
            "precision": self.precision,
            "recall": self.recall,
            "f_measure": self.f_measure,
        }


def polygon_iou(det: Detection, gt: GroundTruthEntry) -> float:
    """IoU between a detection's inclined box and a (possibly non-convex) label quad."""
    rect = det.inclined.corners()
    quad = gt.quad.points()
    # The label is the subject: clipping needs only the clipper to be convex.
    inter = convex_intersection_area(quad, rect)
    union = det.inclined.area + shoelace_area(quad) - inter
    if union <= 0:
        return 0.0
    return min(1.0, max(0.0, inter / union))


def dontcare_fraction(det: Detection, dontcares: Sequence[GroundTruthEntry]) -> float:
    """Fraction of the detection's area covered by don't-care regions (summed)."""
    rect = det.inclined.corners()
    covered = sum(convex_intersection_area(g.quad.points(), rect) for g in dontcares)
    return covered / det.inclined.area


def evaluate(
    dets: Sequence[Detection],
    gts: Sequence[GroundTruthEntry],
    match_iou: float = DEFAULT_MATCH_IOU,
    dontcare_overlap: float = DEFAULT_DONTCARE_OVERLAP,
) -> EvalResult:
    if not (0.0 <= match_iou <= 1.0 and 0.0 <= dontcare_overlap <= 1.0):
        raise ValueError("thresholds must lie in [0, 1]")
    dontcares = [g for g in gts if g.dont_care]
    counted_gt = [i for i, g in enumerate(gts) if not g.dont_care]

    kept = []
    for i in score_order(dets):
        if dontcares and dontcare_fraction(dets[i], dontcares) > dontcare_overlap:
            continue
        kept.append(i)

    unmatched = set(counted_gt)
    matches = []
    for i in kept:
        best_iou, best_g = match_iou, None
        for g in counted_gt:
            if g not in unmatched:
                continue
            iou = polygon_iou(dets[i], gts[g])
            if iou > best_iou:
                best_iou, best_g = iou, g
        if best_g is not None:
            unmatched.discard(best_g)
            matches.append((i, best_g))

    return EvalResult(len(matches), len(kept), len(counted_gt), matches)


def aggregate(results: Sequence[EvalResult]) -> EvalResult:
    """Corpus totals; per-image matches are not carried over."""
    return EvalResult(
        sum(r.true_positives for r in results),
        sum(r.num_detections_counted for r in results),
        sum(r.num_gt_counted for r in results),
    )
