"""Post-network pipeline driven by fixture files in place of the CNN head.

Fixture files are line-oriented text, one record per line; fields are separated
by whitespace and/or commas, blank lines and ``#`` comments are ignored.

- proposals: ``cx cy w h`` (axis-aligned RPN proposal, pixels)
- logits:    ``l0 l1`` (background, text)
- deltas:    ``vx vy vw vh ux1 uy1 ux2 uy2 uh``

Record ``k`` of each file belongs to proposal ``k``.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from rotdet.boxcodec import AADeltas, InclinedDeltas, decode_aabb, decode_inclined, softmax2
from rotdet.errors import DegenerateDecode, FixtureMismatch, ParseError
from rotdet.geometry import AABB
from rotdet.nms import DEFAULT_NMS_IOU, Detection, nms
from rotdet.roipool import DEFAULT_POOLED_SIZES, FeatureMap, multi_pool_concat

log = logging.getLogger(__name__)

_SPLIT = re.compile(r"[\s,]+")


@dataclass(frozen=True)
class PostprocessConfig:
    score_threshold: float = 0.5
    nms_iou: float = DEFAULT_NMS_IOU
    nms_mode: str = "inclined"
    pooled_sizes: tuple[tuple[int, int], ...] = DEFAULT_POOLED_SIZES

    def __post_init__(self):
        if not (0.0 <= self.score_threshold <= 1.0 and 0.0 <= self.nms_iou <= 1.0):
            raise ValueError("thresholds must lie in [0, 1]")
        if self.nms_mode not in ("inclined", "axis_aligned"):
            raise ValueError(f"unknown NMS mode {self.nms_mode!r}")
        if any(h <= 0 or w <= 0 for h, w in self.pooled_sizes):
            raise ValueError("pooled sizes must be positive")


@dataclass
class PostprocessResult:
    detections: list[Detection]
    proposal_index: list[int]  # source proposal of each kept detection
    num_proposals: int = 0
    num_scored: int = 0
    num_degenerate: int = 0
    pooled: Optional[np.ndarray] = field(default=None, repr=False)


def parse_records(content: str, width: int, what: str = "fixture", path=None) -> list[tuple[float, ...]]:
    records = []
    for lineno, line in enumerate(content.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f for f in _SPLIT.split(line) if f]
        if len(fields) != width:
            raise ParseError(f"{what} record needs {width} values, got {len(fields)}", lineno, path)
        try:
            records.append(tuple(float(f) for f in fields))
        except ValueError:
            raise ParseError(f"non-numeric {what} field in {line!r}", lineno, path) from None
    return records


def format_records(records: Sequence[Sequence[float]]) -> str:
    return "".join(" ".join(repr(float(v)) for v in r) + "\n" for r in records)


def postprocess(
    proposals: Sequence[AABB],
    logits: Sequence[tuple[float, float]],
    deltas: Sequence[tuple[AADeltas, InclinedDeltas]],
    cfg: PostprocessConfig = PostprocessConfig(),
    feature_map: Optional[FeatureMap] = None,
) -> PostprocessResult:
    """Score, decode and suppress; returns kept detections in keep order."""
    if not (len(proposals) == len(logits) == len(deltas)):
        raise FixtureMismatch(
            f"record counts differ: {len(proposals)} proposals, {len(logits)} logits, "
            f"{len(deltas)} deltas"
        )
    candidates: list[Detection] = []
    source: list[int] = []
    degenerate = 0
    for k, (prop, (l0, l1), (v, u)) in enumerate(zip(proposals, logits, deltas)):
        p = softmax2(l0, l1)
        if p.p1 < cfg.score_threshold:
            continue
        box = decode_aabb(prop, v)
        try:
            rect = decode_inclined(prop, u)
        except DegenerateDecode:
            degenerate += 1
            continue
        candidates.append(Detection(rect, box, p.p1))
        source.append(k)
    if degenerate:
        log.warning("dropped %d proposal(s) with degenerate inclined boxes", degenerate)

    keep = nms(candidates, cfg.nms_iou, cfg.nms_mode)
    pooled = None
    if feature_map is not None:
        pooled = np.array(
            [multi_pool_concat(feature_map, prop, cfg.pooled_sizes) for prop in proposals]
        ).reshape(len(proposals), -1)
    return PostprocessResult(
        [candidates[i] for i in keep],
        [source[i] for i in keep],
        num_proposals=len(proposals),
        num_scored=len(candidates) + degenerate,
        num_degenerate=degenerate,
        pooled=pooled,
    )


def load_fixtures(proposals_text: str, logits_text: str, deltas_text: str, paths=(None, None, None)):
    """Parse the three fixture texts into ``postprocess`` arguments."""
    props = [AABB(*r) for r in parse_records(proposals_text, 4, "proposal", paths[0])]
    logits = [tuple(r) for r in parse_records(logits_text, 2, "logit", paths[1])]
    deltas = [
        (AADeltas(*r[:4]), InclinedDeltas(*r[4:]))
        for r in parse_records(deltas_text, 9, "delta", paths[2])
    ]
    return props, logits, deltas
