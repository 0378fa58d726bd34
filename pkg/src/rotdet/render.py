"""Deterministic SVG overlays of label and detection boxes.

Polygons carry the classes ``gt``, ``gt dontcare`` and ``det`` so the two sets
can be told apart and restyled; coordinates are printed with two decimals.
"""

from __future__ import annotations

from typing import Sequence

from rotdet.icdar_io import GroundTruthEntry
from rotdet.nms import Detection

_STYLE = (
    ".gt{fill:none;stroke:#00a000;stroke-width:2}"
    ".dontcare{stroke:#808080;stroke-dasharray:4 3}"
    ".det{fill:none;stroke:#d00000;stroke-width:2}"
)


def _points(pts) -> str:
    return " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)


def render_svg(
    width: int,
    height: int,
    gts: Sequence[GroundTruthEntry] = (),
    dets: Sequence[Detection] = (),
) -> str:
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<style>{_STYLE}</style>",
    ]
    for g in gts:
        cls = "gt dontcare" if g.dont_care else "gt"
        lines.append(f'<polygon class="{cls}" points="{_points(g.quad.points())}"/>')
    for d in dets:
        lines.append(f'<polygon class="det" points="{_points(d.inclined.corners())}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
