import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from rotdet.geometry import AABB, Point2, Quad, RotRect  # noqa: E402

DATA = Path(__file__).parent / "data"

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

coord = st.floats(-500, 500, allow_nan=False, allow_infinity=False)
size = st.floats(1.0, 200.0, allow_nan=False, allow_infinity=False)
angle = st.floats(-math.pi, math.pi, allow_nan=False, allow_infinity=False)


@st.composite
def rotrects(draw):
    x, y, w, h, a = draw(coord), draw(coord), draw(size), draw(size), draw(angle)
    return RotRect(Point2(x, y), Point2(x + w * math.cos(a), y + w * math.sin(a)), h)


@st.composite
def aabbs(draw):
    return AABB(draw(coord), draw(coord), draw(size), draw(size))


@pytest.fixture
def data_dir():
    return DATA


def random_rotrect(rng, center_spread=50.0, size_range=(5.0, 60.0)):
    cx, cy = rng.uniform(-center_spread, center_spread, 2)
    w, h = rng.uniform(*size_range, 2)
    a = rng.uniform(-math.pi, math.pi)
    ux, uy = math.cos(a), math.sin(a)
    # p1 such that the rectangle is centred at (cx, cy)
    x1 = cx - ux * w / 2 + uy * h / 2
    y1 = cy - uy * w / 2 - ux * h / 2
    return RotRect(Point2(x1, y1), Point2(x1 + ux * w, y1 + uy * w), h)


def random_quad(rng, radius=(10.0, 80.0)):
    """Simple clockwise quad (convex or not) from four sorted polar angles."""
    while True:
        ang = np.sort(rng.uniform(0, 2 * math.pi, 4))
        r = rng.uniform(*radius, 4)
        cx, cy = rng.uniform(-100, 100, 2)
        pts = [(cx + ri * math.cos(a), cy + ri * math.sin(a)) for ri, a in zip(r, ang)]
        try:
            return Quad(tuple(Point2(*p) for p in pts))
        except ValueError:
            continue


def random_detections(rng, n, spread=60.0):
    """Clustered detections with random scores, so overlaps of every size occur."""
    from rotdet.nms import Detection

    dets = []
    for _ in range(n):
        r = random_rotrect(rng, spread, (5.0, 50.0))
        dets.append(Detection.from_rotrect(r, float(rng.integers(0, 20)) / 19))  # coarse scores force ties
    return dets


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(results, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
