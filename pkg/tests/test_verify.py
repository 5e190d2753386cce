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

import json

import pytest

from src.diagonals import slope_through
from src.errors import CapExceeded
from src.spiral import make_spec, pole_closed
from src.verify import DEFAULT_GRID, LIMIT_CHECKS, SPEC_ROW, TOLERANCES, Summary, run_suite


@pytest.fixture(scope="module")
def default_report():
    return run_suite()


def test_default_suite_passes(default_report):
    failed = [row for row in default_report.checks if not row.passed]
    assert not failed
    assert default_report.all_passed
    assert default_report.summary.total == len(default_report.checks)
    assert default_report.grid == list(DEFAULT_GRID)


def test_every_check_is_reported(default_report):
    assert {row.name for row in default_report.checks} == set(TOLERANCES)
    for row in default_report.checks:
        assert row.tolerance == TOLERANCES[row.name]
        assert row.residual < row.tolerance


def test_rows_are_sorted(default_report):
    keys = [(row.name, row.m, row.i is not None, row.i or 0) for row in default_report.checks]
    assert keys == sorted(keys)


def test_per_square_rows(default_report):
    rows = [r for r in default_report.checks if r.name == "center_closed_vs_recursive" and r.m == 2.0]
    assert [r.i for r in rows] == list(range(31))


def test_invalid_ratio_gives_one_row():
    report = run_suite(grid=[1.0, 2.0], max_i=3)
    spec_rows = [r for r in report.checks if r.name == SPEC_ROW]
    assert len(spec_rows) == 1
    row = spec_rows[0]
    assert row.m == 1.0 and not row.passed
    assert row.reason.startswith("RatioOutOfRange:")
    assert not report.all_passed
    assert report.summary.passed == report.summary.total - 1
    assert any(r.m == 2.0 for r in report.checks)


def test_limit_rows_only_for_non_empty_grid():
    names = {r.name for r in run_suite(grid=[1.618], max_i=2).checks}
    assert set(LIMIT_CHECKS) <= names


def test_empty_grid():
    report = run_suite(grid=[])
    assert report.checks == []
    assert report.summary == Summary(0, 0, 0.0)
    assert report.all_passed


def test_json_is_deterministic():
    a = run_suite(grid=[1.1, 2.0], max_i=5, workers=1).to_json()
    b = run_suite(grid=[1.1, 2.0], max_i=5, workers=4).to_json()
    assert a == b
    assert a.endswith("\n")
    payload = json.loads(a)
    assert list(payload) == ["grid", "checks", "summary"]
    assert list(payload["summary"]) == ["total", "passed", "max_residual"]
    assert payload["checks"][0].keys() == {"name", "m", "i", "residual", "tolerance", "passed", "reason"}


@pytest.mark.parametrize("max_i", [65, -1, 2.5])
def test_max_i_cap(max_i):
    with pytest.raises(CapExceeded):
        run_suite(grid=[2.0], max_i=max_i)


def test_pole_slope_rows_use_segment_slope(default_report):
    rows = [r for r in default_report.checks if r.name == "pole_slope_from_lower_right"]
    assert sorted(r.m for r in rows) == sorted(DEFAULT_GRID)
    for row in rows:
        spec = make_spec(row.m)
        expected = abs(slope_through(spec.lower_right, pole_closed(spec).point) - row.m) / row.m
        assert row.residual == expected
