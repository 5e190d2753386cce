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

"""Property suite over a grid of ratios, reported as JSON."""

import dataclasses
import json
import logging
import math
import os
from concurrent import futures
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from src.diagonals import compute_report, diagonal_vectors, slope_through
from src.errors import CapExceeded, SpiralError
from src.spiral import (DEFAULT_TOL, MAX_ITERATIONS, MAX_SQUARES, make_spec, pole_closed, pole_closed_forms,
                        pole_iterative, pole_offset, square_center_closed, square_center_recursive)

logger = logging.getLogger(__name__)

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0
DEFAULT_GRID = (1.01, 1.1, 1.2851990332, 1.3247179572, 1.4655712318, GOLDEN, 2.0, 5.0, 60.0)
DEFAULT_MAX_I = 30
ABSOLUTE_RADIUS_FLOOR = 1e-6

NEAR_ONE = 1.0 + 1e-6
LARGE_RATIO = 1e6
RATIO_60 = 60.0

# check name -> tolerance; residuals are relative to L (or to m for ratios)
TOLERANCES = {
    "center_closed_vs_recursive": 1e-11,
    "pole_iterative_vs_closed": 1e-11,
    "pole_forms_agree": 1e-14,
    "pole_slope_from_lower_right": 1e-12,
    "pole_on_first_circumcircle": 1e-12,
    "circumcircle_through_pole": 1e-10,
    "circumcircle_absolute": 1e-12,
    "diagonals_orthogonal": 1e-12,
    "diagonals_meet_at_pole": 1e-12,
    "diagonal_length_ratio": 1e-12,
    "diagonal_slopes": 1e-12,
    "diagonal_rotation_witness": 1e-12,
    "eye_vectors_orthogonal": 1e-12,
    "pole_limit_near_one": 1e-5,
    "pole_limit_large_ratio": 1e-5,
    "pole_near_upper_right_at_60": 0.02,
}
SPEC_ROW = "spec"
LIMIT_CHECKS = ("pole_limit_near_one", "pole_limit_large_ratio", "pole_near_upper_right_at_60")


@dataclass(frozen=True)
class CheckRow:
    name: str
    m: float
    i: Optional[int]
    residual: Optional[float]
    tolerance: Optional[float]
    passed: bool
    reason: Optional[str] = None


@dataclass(frozen=True)
class Summary:
    total: int
    passed: int
    max_residual: float


@dataclass(frozen=True)
class VerificationReport:
    grid: List[float]
    checks: List[CheckRow]
    summary: Summary

    @property
    def all_passed(self):
        return self.summary.passed == self.summary.total

    def to_json(self):
        return json.dumps(dataclasses.asdict(self), indent=2) + "\n"


class Tally:
    """
    running totals of a report
    """

    def __init__(self):
        self.total = 0
        self.passed = 0
        self.max_residual = 0.0

    def update(self, row):
        self.total += 1
        self.passed += int(row.passed)
        if row.residual is not None and math.isfinite(row.residual):
            self.max_residual = max(self.max_residual, row.residual)

    def summary(self):
        return Summary(self.total, self.passed, self.max_residual)

    def log_result(self):
        logger.info("verify: %d/%d checks passed, max residual %.3e", self.passed, self.total, self.max_residual)


def _row(name, m, residual, i=None):
    tolerance = TOLERANCES[name]
    residual = float(residual)
    return CheckRow(name, float(m), i, residual, tolerance, bool(residual < tolerance))


def _failed(name, m, reason, i=None):
    return CheckRow(name, m, i, None, TOLERANCES.get(name), False, reason)


def _ratio_rows(spec, max_i, tol, max_iterations):
    m, side = spec.m, spec.L
    rows = []
    pole = pole_closed(spec).point

    for i in range(max_i + 1):
        closed = square_center_closed(spec, i)
        recursive = square_center_recursive(spec, i)
        rows.append(_row("center_closed_vs_recursive", m, closed.distance(recursive) / side, i))

        offset = np.hypot(*pole_offset(spec, i))
        try:
            side_i = side / m ** i
        except OverflowError:
            side_i = 0.0
        if side_i == 0.0 or offset == 0.0:
            rows.append(_failed("circumcircle_through_pole", m, "square side underflows", i))
        else:
            rows.append(_row("circumcircle_through_pole", m, abs(2.0 * (offset / side_i) ** 2 - 1.0), i))
        radius = side_i / math.sqrt(2.0)
        if radius > ABSOLUTE_RADIUS_FLOOR * side:
            rows.append(_row("circumcircle_absolute", m, abs(pole.distance(closed) - radius) / side, i))

    try:
        iterative = pole_iterative(spec, tol, max_iterations)
        rows.append(_row("pole_iterative_vs_closed", m, iterative.point.distance(pole) / side))
    except SpiralError as e:
        rows.append(_failed("pole_iterative_vs_closed", m, str(e)))

    upper, lower = pole_closed_forms(spec)
    scale = max(side, abs(upper.x), abs(upper.y))
    rows.append(_row("pole_forms_agree", m, max(abs(upper.x - lower.x), abs(upper.y - lower.y)) / scale))
    slope = slope_through(spec.lower_right, pole)
    rows.append(_row("pole_slope_from_lower_right", m, abs(slope - m) / m))
    rows.append(_row("pole_on_first_circumcircle", m,
                     abs(pole.distance(spec.center0) ** 2 - side * side / 2.0) / (side * side)))

    report = compute_report(spec)
    rows.append(_row("diagonals_orthogonal", m, report.orthogonality_residual))
    rows.append(_row("diagonals_meet_at_pole", m, report.pole_distance / side))
    rows.append(_row("diagonal_length_ratio", m, abs(report.length_ratio - m) / m))
    s1, s2 = report.slopes
    rows.append(_row("diagonal_slopes", m, max(abs(s1 * m + 1.0), abs(s2 - m) / m)))
    d1, d2 = diagonal_vectors(spec)
    rotated = np.array([-d2[1], d2[0]])
    rows.append(_row("diagonal_rotation_witness", m, np.linalg.norm(rotated - d1 / m) / np.linalg.norm(d1 / m)))
    rows.append(_row("eye_vectors_orthogonal", m, report.eye_residual))
    return rows


def _entry_rows(m, L, max_i, tol, max_iterations):
    try:
        return _ratio_rows(make_spec(m, L), max_i, tol, max_iterations)
    except SpiralError as e:
        return [CheckRow(SPEC_ROW, m, None, None, None, False, f"{type(e).__name__}: {e}")]


def _limit_rows(L):
    rows = []
    near = make_spec(NEAR_ONE, L)
    rows.append(_row("pole_limit_near_one", NEAR_ONE, pole_closed(near).point.distance(near.lower_right) / L))
    large = make_spec(LARGE_RATIO, L)
    rows.append(_row("pole_limit_large_ratio", LARGE_RATIO,
                     pole_closed(large).point.distance(large.upper_right) / L))
    # per coordinate, the Euclidean distance at m=60 is 0.0236 L
    at_60 = make_spec(RATIO_60, L)
    pole, ur = pole_closed(at_60).point, at_60.upper_right
    rows.append(_row("pole_near_upper_right_at_60", RATIO_60, max(abs(pole.x - ur.x), abs(pole.y - ur.y)) / L))
    return rows


def _sort_key(row):
    m = row.m if isinstance(row.m, (int, float)) and not math.isnan(row.m) else math.inf
    return row.name, m, row.i is not None, row.i or 0


def run_suite(grid=DEFAULT_GRID, L=1.0, max_i=DEFAULT_MAX_I, tol=DEFAULT_TOL,
              max_iterations=MAX_ITERATIONS, workers=None):
    """
    Run every check for every ratio of the grid.

    A ratio that fails validation gives a single failed row and does not stop
    the other entries. Rows are ordered by check name, m and i.
    """
    if int(max_i) != max_i or not 0 <= max_i <= MAX_SQUARES:
        raise CapExceeded(f"max_i must be an integer in [0, {MAX_SQUARES}], got {max_i!r}")
    grid = list(grid)
    # any valid ratio, only L is checked here
    L = make_spec(2.0, L).L

    rows = []
    max_workers = workers or min(max(len(grid), 1), os.cpu_count() or 1)
    with futures.ThreadPoolExecutor(max_workers=max_workers) as tp:
        tasks = [tp.submit(_entry_rows, m, L, int(max_i), tol, max_iterations) for m in grid]
        if grid:
            tasks.append(tp.submit(_limit_rows, L))
        for task in tasks:
            rows.extend(task.result())
    rows.sort(key=_sort_key)

    tally = Tally()
    for row in rows:
        tally.update(row)
        if not row.passed:
            logger.warning("verify: %s failed for m=%r i=%r: residual=%r %s",
                           row.name, row.m, row.i, row.residual, row.reason or "")
    tally.log_result()
    return VerificationReport(grid=[float(m) if isinstance(m, (int, float)) else m for m in grid],
                              checks=rows, summary=tally.summary())
