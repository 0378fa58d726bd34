"""Inclined-box text detection post-processing: geometry, box coding, losses,
anchors, ROI pooling, NMS, ICDAR I/O and evaluation."""

from rotdet.errors import (
    DecodeOverflow,
    DegenerateDecode,
    DegenerateInput,
    EmptyRoi,
    FixtureMismatch,
    InfiniteLoss,
    ParseError,
)
from rotdet.geometry import (
    AABB,
    Point2,
    Quad,
    RotRect,
    aabb_iou,
    canonicalize,
    enclosing_aabb,
    min_area_rect,
    polygon_intersection_area,
    rotate_quad,
    rotated_iou,
)

__version__ = "0.1.0"
