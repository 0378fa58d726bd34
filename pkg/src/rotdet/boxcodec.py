"""Regression targets relative to a proposal box, and the per-proposal loss.

Axis-aligned deltas use the usual scale-invariant center shift and log-space
size shift.  Inclined deltas encode the first two rectangle points the same way
as the center (x by proposal width, y by proposal height) and the rectangle
height the same way as the box height.  Both are relative to the same proposal.
"""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass

from rotdet.errors import DecodeOverflow, DegenerateDecode, InfiniteLoss
from rotdet.geometry import AABB, EPS, Point2, RotRect

MAX_LOG_DELTA = 50.0


def _check_finite(obj):
    for name, value in zip(obj.__dataclass_fields__, astuple(obj)):
        if not math.isfinite(value):
            raise ValueError(f"{type(obj).__name__}.{name} is not finite")


@dataclass(frozen=True)
class AADeltas:
    vx: float
    vy: float
    vw: float
    vh: float

    def __post_init__(self):
        _check_finite(self)

    def as_tuple(self) -> tuple[float, ...]:
        return astuple(self)


@dataclass(frozen=True)
class InclinedDeltas:
    ux1: float
    uy1: float
    ux2: float
    uy2: float
    uh: float

    def __post_init__(self):
        _check_finite(self)

    def as_tuple(self) -> tuple[float, ...]:
        return astuple(self)


@dataclass(frozen=True)
class ClassProb:
    """Background / text probabilities ``(p0, p1)``."""

    p0: float
    p1: float

    def __post_init__(self):
        if not (0.0 <= self.p0 <= 1.0 and 0.0 <= self.p1 <= 1.0):
            raise ValueError(f"probabilities out of [0, 1]: {self.p0}, {self.p1}")
        if abs(self.p0 + self.p1 - 1.0) > 1e-12:
            raise ValueError(f"probabilities do not sum to 1: {self.p0} + {self.p1}")

    def __getitem__(self, t: int) -> float:
        return (self.p0, self.p1)[t]


@dataclass(frozen=True)
class LossWeights:
    lambda1: float = 1.0
    lambda2: float = 1.0

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("loss weights must be non-negative")


def _exp_checked(x: float) -> float:
    if x > MAX_LOG_DELTA:
        raise DecodeOverflow(f"log-space delta {x} exceeds {MAX_LOG_DELTA}")
    return math.exp(x)


def encode_aabb(proposal: AABB, gt: AABB) -> AADeltas:
    return AADeltas(
        (gt.cx - proposal.cx) / proposal.w,
        (gt.cy - proposal.cy) / proposal.h,
        math.log(gt.w / proposal.w),
        math.log(gt.h / proposal.h),
    )


def decode_aabb(proposal: AABB, d: AADeltas) -> AABB:
    return AABB(
        proposal.cx + d.vx * proposal.w,
        proposal.cy + d.vy * proposal.h,
        proposal.w * _exp_checked(d.vw),
        proposal.h * _exp_checked(d.vh),
    )


def encode_inclined(proposal: AABB, gt: RotRect) -> InclinedDeltas:
    """Encode ``gt`` keeping its point order; callers pick canonical or label order."""
    return InclinedDeltas(
        (gt.p1.x - proposal.cx) / proposal.w,
        (gt.p1.y - proposal.cy) / proposal.h,
        (gt.p2.x - proposal.cx) / proposal.w,
        (gt.p2.y - proposal.cy) / proposal.h,
        math.log(gt.height / proposal.h),
    )


def decode_inclined(proposal: AABB, d: InclinedDeltas) -> RotRect:
    p1 = Point2(proposal.cx + d.ux1 * proposal.w, proposal.cy + d.uy1 * proposal.h)
    p2 = Point2(proposal.cx + d.ux2 * proposal.w, proposal.cy + d.uy2 * proposal.h)
    height = proposal.h * _exp_checked(d.uh)
    if math.hypot(p2.x - p1.x, p2.y - p1.y) <= EPS:
        raise DegenerateDecode(f"decoded edge is degenerate: {p1} -> {p2}")
    if height <= EPS:
        raise DegenerateDecode(f"decoded height {height} is degenerate")
    return RotRect(p1, p2, height)


def smooth_l1(x: float) -> float:
    ax = abs(x)
    if ax < 1.0:
        return 0.5 * x * x
    return ax - 0.5


def reg_loss(pred, target) -> float:
    """Sum of smooth-L1 residuals over matching delta components."""
    if type(pred) is not type(target):
        raise TypeError(f"cannot compare {type(pred).__name__} with {type(target).__name__}")
    return sum(smooth_l1(a - b) for a, b in zip(pred.as_tuple(), target.as_tuple()))


def softmax2(logit0: float, logit1: float) -> ClassProb:
    m = max(logit0, logit1)
    e0 = math.exp(logit0 - m)
    e1 = math.exp(logit1 - m)
    s = e0 + e1
    return ClassProb(e0 / s, e1 / s)


def cls_loss(p: ClassProb, t: int) -> float:
    if t not in (0, 1):
        raise ValueError(f"class label must be 0 or 1, got {t!r}")
    pt = p[t]
    if pt == 0.0:
        raise InfiniteLoss(f"log loss of class {t} with probability 0")
    return -math.log(pt)


def multitask_loss(
    p: ClassProb,
    t: int,
    v_pred: AADeltas,
    v_tgt: AADeltas,
    u_pred: InclinedDeltas,
    u_tgt: InclinedDeltas,
    weights: LossWeights = LossWeights(),
) -> float:
    """Classification log loss plus box regression, the latter only for text (t=1)."""
    loss = cls_loss(p, t)
    if t == 1:
        loss += weights.lambda1 * reg_loss(v_pred, v_tgt)
        loss += weights.lambda2 * reg_loss(u_pred, u_tgt)
    return loss
