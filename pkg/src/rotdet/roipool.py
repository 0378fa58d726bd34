"""Quantized ROI max pooling and multi-size concatenation.

Feature-map text format (shared with ``rotdet postprocess --feature-map``)::

    # comment lines start with '#'
    <channels> <height> <width> <stride>
    <values ...>

Values follow the header as whitespace-separated reals in channel-major,
row-major order (``C * H * W`` of them); line breaks are free-form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from rotdet.errors import EmptyRoi, ParseError
from rotdet.geometry import AABB

DEFAULT_POOLED_SIZES = ((7, 7), (11, 3), (3, 11))


@dataclass(frozen=True, eq=False)
class FeatureMap:
    data: np.ndarray  # (channels, height, width)
    stride: float

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 3:
            raise ValueError(f"feature map data must be 3-D (C, H, W), got shape {data.shape}")
        if self.stride <= 0:
            raise ValueError("stride must be positive")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @classmethod
    def from_flat(cls, values, channels: int, height: int, width: int, stride: float) -> "FeatureMap":
        values = np.asarray(values, dtype=np.float64)
        if values.size != channels * height * width:
            raise ValueError(
                f"expected {channels * height * width} values, got {values.size}"
            )
        return cls(values.reshape(channels, height, width), stride)

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True, eq=False)
class PooledFeatures:
    data: np.ndarray  # (channels, pooled_h, pooled_w)

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def pooled_h(self) -> int:
        return self.data.shape[1]

    @property
    def pooled_w(self) -> int:
        return self.data.shape[2]


def project_roi(fm: FeatureMap, roi: AABB) -> tuple[int, int, int, int]:
    """Feature-cell window ``(x0, y0, x1, y1)``, end-exclusive, clamped to the map."""
    x0 = math.floor(roi.x1 / fm.stride)
    y0 = math.floor(roi.y1 / fm.stride)
    x1 = max(math.ceil(roi.x2 / fm.stride), x0 + 1)
    y1 = max(math.ceil(roi.y2 / fm.stride), y0 + 1)
    x0, x1 = max(0, x0), min(fm.width, x1)
    y0, y1 = max(0, y0), min(fm.height, y1)
    if x1 <= x0 or y1 <= y0:
        raise EmptyRoi(f"roi {roi} falls outside the {fm.height}x{fm.width} feature map")
    return x0, y0, x1, y1


def _bin_edges(n: int, bins: int) -> list[tuple[int, int]]:
    # floor(i * n / bins) .. ceil((i + 1) * n / bins), in exact integer arithmetic
    return [((i * n) // bins, -((-(i + 1) * n) // bins)) for i in range(bins)]


def roi_pool(fm: FeatureMap, roi: AABB, pooled_h: int, pooled_w: int) -> PooledFeatures:
    if pooled_h <= 0 or pooled_w <= 0:
        raise ValueError("pooled sizes must be positive")
    x0, y0, x1, y1 = project_roi(fm, roi)
    window = fm.data[:, y0:y1, x0:x1]
    out = np.zeros((fm.channels, pooled_h, pooled_w))
    cols = _bin_edges(x1 - x0, pooled_w)
    for i, (r0, r1) in enumerate(_bin_edges(y1 - y0, pooled_h)):
        band = window[:, r0:r1, :]
        if band.shape[1] == 0:
            continue
        for j, (c0, c1) in enumerate(cols):
            if c1 > c0:
                out[:, i, j] = band[:, :, c0:c1].max(axis=(1, 2))
    return PooledFeatures(out)


def multi_pool_concat(
    fm: FeatureMap, roi: AABB, sizes: Sequence[tuple[int, int]] = DEFAULT_POOLED_SIZES
) -> np.ndarray:
    """Flat vector of each pooled block (channel-major) in ``sizes`` order."""
    return np.concatenate([roi_pool(fm, roi, h, w).data.ravel() for h, w in sizes])


def parse_feature_map(content: str) -> FeatureMap:
    tokens = []
    header = None
    for lineno, line in enumerate(content.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 4:
                raise ParseError("feature map header must be 'channels height width stride'", lineno)
            try:
                header = (int(parts[0]), int(parts[1]), int(parts[2]), float(parts[3]))
            except ValueError:
                raise ParseError(f"bad feature map header {line!r}", lineno) from None
            continue
        tokens.extend(line.split())
    if header is None:
        raise ParseError("feature map has no header")
    c, h, w, stride = header
    try:
        values = np.array([float(t) for t in tokens])
    except ValueError as exc:
        raise ParseError(f"bad feature value: {exc}") from None
    if values.size != c * h * w:
        raise ParseError(f"expected {c * h * w} feature values, found {values.size}")
    return FeatureMap.from_flat(values, c, h, w, stride)


def format_feature_map(fm: FeatureMap) -> str:
    lines = [f"{fm.channels} {fm.height} {fm.width} {fm.stride!r}"]
    for ch in fm.data:
        for row in ch:
            lines.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"
