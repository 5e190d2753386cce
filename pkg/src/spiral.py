# Copyright 2022 Huawei Technologies Co., Ltd
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ============================================================================

"""Whirling squares, square centers, poles and arcs of m-spirals.

All coordinates use the y-up mathematical frame. Lengths and tolerances are
relative to the first square's side L.
"""

import logging
import math
from dataclasses import dataclass
from itertools import islice

import numpy as np

from src.errors import (BadOptions, BadPoint, BadSide, CapExceeded, MaxIterations, RatioOutOfRange,
                        SpiralError, ToleranceOutOfRange)

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
MAX_SQUARES = 64
MAX_ITERATIONS = 1000000
FORM_TOLERANCE = 1e-14

CLOSED_FORM = "closed-form"
ITERATIVE = "iterative"

# state -> ((sign of L/2, sign of L/2m) for x, (same) for y)
_STEPS = {
    1: ((1.0, 1.0), (1.0, -1.0)),
    2: ((1.0, -1.0), (-1.0, -1.0)),
    3: ((-1.0, -1.0), (-1.0, 1.0)),
    4: ((-1.0, 1.0), (1.0, 1.0)),
}

# vertex order of square_vertices: upper-right, upper-left, lower-left, lower-right
UR, UL, LL, LR = range(4)
# state -> (arc center vertex, start vertex, end vertex, start angle)
_ARC_LAYOUT = {
    4: (LR, LL, UR, math.pi),
    1: (LL, UL, LR, math.pi / 2),
    2: (UL, UR, LL, 0.0),
    3: (UR, LR, UL, -math.pi / 2),
}


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise BadPoint(f"point coordinates must be finite, got ({self.x}, {self.y})")

    def distance(self, other):
        return math.hypot(self.x - other.x, self.y - other.y)

    def translated(self, dx, dy):
        return Point(self.x + dx, self.y + dy)

    def as_tuple(self):
        return self.x, self.y


@dataclass(frozen=True)
class SpiralSpec:
    """
    Generative seed of an m-spiral: ratio m, first side L and first center.
    """
    m: float
    L: float
    center0: Point

    def __post_init__(self):
        if not isinstance(self.center0, Point):
            object.__setattr__(self, "center0", Point(*self.center0))
        try:
            m = float(self.m)
        except (TypeError, ValueError):
            raise RatioOutOfRange(f"ratio m must be a real number, got {self.m!r}") from None
        if not math.isfinite(m) or m <= 1.0:
            raise RatioOutOfRange(f"ratio m must be finite and > 1, got {self.m!r}")
        try:
            side = float(self.L)
        except (TypeError, ValueError):
            raise BadSide(f"side L must be a real number, got {self.L!r}") from None
        if not math.isfinite(side) or side <= 0.0:
            raise BadSide(f"side L must be finite and > 0, got {self.L!r}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "L", side)

    @property
    def upper_right(self):
        return Point(self.center0.x + self.L / 2, self.center0.y + self.L / 2)

    @property
    def lower_right(self):
        return Point(self.center0.x + self.L / 2, self.center0.y - self.L / 2)


@dataclass(frozen=True)
class Square:
    index: int
    center: Point
    side: float
    state: int


@dataclass(frozen=True)
class Pole:
    point: Point
    method: str
    residual: float
    iterations: int


@dataclass(frozen=True)
class ArcGeometry:
    """Quarter arc drawn inside one square, swept clockwise from start to end."""
    center: Point
    radius: float
    start_angle: float
    end_angle: float
    start: Point
    end: Point


def make_spec(m, L=1.0, center0=Point(0.0, 0.0)):
    """
    Validate and build a SpiralSpec.
    """
    return SpiralSpec(m, L, center0)


def _check_index(i):
    if int(i) != i or i < 0:
        raise SpiralError(f"square index must be a non-negative integer, got {i!r}")
    return int(i)


def _side(L, m, i):
    try:
        return L / m ** i
    except OverflowError:
        return 0.0


def _k1(m, i):
    return 1.0 - (-1.0 / (m * m)) ** (i // 2)


def _k2(m, i):
    return (-1.0) ** (i // 2) * 0.5 * (1.0 / m) ** i


def _whirl(spec):
    """
    Run the four-state automaton. Yields (index, x, y, side, state) forever.
    """
    x, y = spec.center0.x, spec.center0.y
    side = spec.L
    m = spec.m
    yield 0, x, y, side, 4
    state = 1
    i = 0
    while True:
        (sx, tx), (sy, ty) = _STEPS[state]
        half = side / 2
        half_next = side / (2 * m)
        x = x + sx * half + tx * half_next
        y = y + sy * half + ty * half_next
        side = side / m
        i += 1
        yield i, x, y, side, state
        state = state % 4 + 1


def square_center_closed(spec, i):
    """
    Center of square i from the closed form, anchored on the upper-right vertex.
    """
    i = _check_index(i)
    if i == 0:
        return spec.center0
    m, side = spec.m, spec.L
    denom = m * m + 1.0
    k1 = _k1(m, i)
    k2 = _k2(m, i)
    parity = -1.0 if i % 2 else 1.0
    ur = spec.upper_right
    x = ur.x + side * (k1 * (m - 1.0) / denom - parity * k2)
    y = ur.y - side * (k1 * (m + 1.0) / denom + k2)
    return Point(x, y)


def square_center_recursive(spec, i):
    i = _check_index(i)
    _, x, y, _, _ = next(islice(_whirl(spec), i, None))
    return Point(x, y)


def pole_closed_forms(spec):
    """
    Both algebraic forms of the pole: anchored on the upper-right vertex and
    on the lower-right vertex of the first square.
    """
    m, side = spec.m, spec.L
    denom = m * m + 1.0
    ur, lr = spec.upper_right, spec.lower_right
    x_eye = ur.x + side * (m - 1.0) / denom
    upper = Point(x_eye, ur.y - side * (m + 1.0) / denom)
    lower = Point(lr.x + side * (m - 1.0) / denom, lr.y + side * m * (m - 1.0) / denom)
    return upper, lower


def pole_closed(spec):
    upper, lower = pole_closed_forms(spec)
    scale = max(spec.L, abs(upper.x), abs(upper.y))
    gap = max(abs(upper.x - lower.x), abs(upper.y - lower.y))
    if gap > FORM_TOLERANCE * scale:
        raise SpiralError(f"pole forms disagree by {gap!r} for m={spec.m!r}")
    return Pole(upper, CLOSED_FORM, 0.0, 0)


def pole_offset(spec, i):
    """
    Vector from the center of square i to the pole.

    Uses 1 - k1(i) = (-1/m^2)^floor(i/2) directly, so deep squares keep their
    relative precision.
    """
    i = _check_index(i)
    m, side = spec.m, spec.L
    denom = m * m + 1.0
    q = (-1.0 / (m * m)) ** (i // 2)
    k2 = _k2(m, i)
    parity = -1.0 if i % 2 else 1.0
    return np.array([side * ((m - 1.0) / denom * q + parity * k2),
                     side * (k2 - (m + 1.0) / denom * q)])


def pole_iterative(spec, tol=DEFAULT_TOL, max_iterations=MAX_ITERATIONS):
    """
    Follow the automaton until one step moves less than tol * L. The
    residual is that last step divided by L.

    The next center lies L_(n+1)/sqrt(2) from the pole, which is below the
    step length, so the returned point is within tol * L of the pole.
    """
    if not 0.0 < tol < 1.0:
        raise ToleranceOutOfRange(f"tol must be in (0, 1), got {tol!r}")
    limit = tol * spec.L
    prev_x, prev_y = spec.center0.x, spec.center0.y
    for i, x, y, _, _ in islice(_whirl(spec), 1, None):
        step = math.hypot(x - prev_x, y - prev_y)
        if step < limit:
            logger.info("pole_iterative: m=%r converged after %d steps, residual %.3e", spec.m, i, step / spec.L)
            return Pole(Point(x, y), ITERATIVE, step / spec.L, i)
        if i >= max_iterations:
            best = Pole(Point(x, y), ITERATIVE, step / spec.L, i)
            raise MaxIterations(f"no convergence within {max_iterations} steps for m={spec.m!r}", best=best)
        prev_x, prev_y = x, y
    raise AssertionError("unreachable")


def whirl_squares(spec, n, max_squares=MAX_SQUARES):
    if int(n) != n or not 1 <= n <= max_squares:
        raise CapExceeded(f"number of squares must be in [1, {max_squares}], got {n!r}")
    squares = []
    for i, x, y, _, state in islice(_whirl(spec), int(n)):
        side = _side(spec.L, spec.m, i)
        if side == 0.0:
            raise CapExceeded(f"side of square {i} underflows for m={spec.m!r}")
        squares.append(Square(i, Point(x, y), side, state))
    return squares


def square_vertices(sq):
    """corners counter-clockwise from the upper-right one"""
    h = sq.side / 2
    cx, cy = sq.center.x, sq.center.y
    return (Point(cx + h, cy + h), Point(cx - h, cy + h),
            Point(cx - h, cy - h), Point(cx + h, cy - h))


def circumscribed_circle(spec, i):
    i = _check_index(i)
    radius = _side(spec.L, spec.m, i) / math.sqrt(2.0)
    return square_center_closed(spec, i), radius


def arc_geometry(sq):
    corners = square_vertices(sq)
    center_at, start_at, end_at, start_angle = _ARC_LAYOUT[sq.state]
    return ArcGeometry(center=corners[center_at], radius=sq.side,
                       start_angle=start_angle, end_angle=start_angle - math.pi / 2,
                       start=corners[start_at], end=corners[end_at])


def arc_segments(spec, n_squares, samples_per_arc, max_squares=MAX_SQUARES):
    """
    One (samples_per_arc, 2) array per square. Each arc starts exactly where
    the previous one ends.
    """
    if int(samples_per_arc) != samples_per_arc or samples_per_arc < 2:
        raise BadOptions(f"samples_per_arc must be an integer >= 2, got {samples_per_arc!r}")
    segments = []
    previous_end = None
    for sq in whirl_squares(spec, n_squares, max_squares):
        arc = arc_geometry(sq)
        t = np.linspace(arc.start_angle, arc.end_angle, int(samples_per_arc))
        pts = np.column_stack((arc.center.x + arc.radius * np.cos(t),
                               arc.center.y + arc.radius * np.sin(t)))
        pts[0] = arc.start.as_tuple() if previous_end is None else previous_end
        pts[-1] = arc.end.as_tuple()
        previous_end = pts[-1].copy()
        segments.append(pts)
    return segments


def arc_polyline(spec, n_squares, samples_per_arc, max_squares=MAX_SQUARES):
    segments = arc_segments(spec, n_squares, samples_per_arc, max_squares)
    return np.vstack([segments[0]] + [seg[1:] for seg in segments[1:]])
