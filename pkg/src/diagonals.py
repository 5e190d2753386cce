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

"""Diagonals through the extreme vertices of the first four squares.

A is the upper-left corner of the first square, B the upper-right corner of
the second, C the lower-right corner of the third and D the lower-left corner
of the fourth. E is the first square's lower-right corner. The algebra runs
in a frame with E at the origin; every public result is in absolute coordinates.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.errors import DegenerateLines
from src.spiral import Point, pole_closed

DET_THRESHOLD = 1e-300


@dataclass(frozen=True)
class DiagonalReport:
    A: Point
    B: Point
    C: Point
    D: Point
    E: Point
    d1: Tuple[float, float]
    d2: Tuple[float, float]
    orthogonality_residual: float
    intersection: Point
    pole_distance: float
    length_ratio: float
    slopes: Tuple[float, float]
    eye_residual: float


def _local_vertices(m, side):
    top = side
    low = side - side / m - side / m ** 2
    return ((-side, top),
            (side / m, top),
            (side / m, low),
            (side / m - side / m ** 2 - side / m ** 3, low))


def extreme_vertices(spec):
    e = spec.lower_right
    a, b, c, d = (e.translated(x, y) for x, y in _local_vertices(spec.m, spec.L))
    return a, b, c, d, e


def diagonal_vectors(spec):
    """
    d1 along AC and d2 along BD, as component formulas.
    """
    m, side = spec.m, spec.L
    d1 = np.array([-side - side / m, side / m + side / m ** 2])
    d2 = np.array([side / m ** 2 + side / m ** 3, side / m + side / m ** 2])
    return d1, d2


def _line_intersection(p, u, q, v):
    # solve p + s*u = q + t*v
    matrix = np.array([[u[0], -v[0]], [u[1], -v[1]]])
    det = np.linalg.det(matrix)
    if abs(det) < DET_THRESHOLD:
        raise DegenerateLines(f"lines are parallel (det={det!r})")
    s, _ = np.linalg.solve(matrix, np.asarray(q) - np.asarray(p))
    return np.asarray(p) + s * np.asarray(u)


def diagonal_intersection(spec):
    """
    Intersection of line(A, C) with line(B, D), independent of the pole formula.
    """
    local = _local_vertices(spec.m, spec.L)
    a, b, c, d = (np.array(v) for v in local)
    x, y = _line_intersection(a, c - a, b, d - b)
    return spec.lower_right.translated(x, y)


def _slope(vec):
    assert vec[0] != 0.0, "vertical diagonal"
    return float(vec[1] / vec[0])


def compute_report(spec):
    a, b, c, d, e = extreme_vertices(spec)
    d1, d2 = diagonal_vectors(spec)
    n1, n2 = np.linalg.norm(d1), np.linalg.norm(d2)
    crossing = diagonal_intersection(spec)
    pole = pole_closed(spec).point

    m, side = spec.m, spec.L
    factor = (m - 1.0) / (m * m + 1.0)
    v_eye = side * np.array([factor, m * factor])
    u_eye = side * np.array([-m * factor, factor])
    eye_residual = abs(float(v_eye @ u_eye)) / (np.linalg.norm(v_eye) * np.linalg.norm(u_eye))

    return DiagonalReport(
        A=a, B=b, C=c, D=d, E=e,
        d1=(float(d1[0]), float(d1[1])),
        d2=(float(d2[0]), float(d2[1])),
        orthogonality_residual=float(abs(d1 @ d2) / (n1 * n2)),
        intersection=crossing,
        pole_distance=crossing.distance(pole),
        length_ratio=float(n1 / n2),
        slopes=(_slope(d1), _slope(d2)),
        eye_residual=float(eye_residual),
    )


def slope_through(p, q):
    """slope of the segment p -> q"""
    dx = q.x - p.x
    if dx == 0.0:
        return math.copysign(math.inf, q.y - p.y)
    return (q.y - p.y) / dx
