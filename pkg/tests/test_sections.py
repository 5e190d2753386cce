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

import logging
from types import SimpleNamespace

import pytest
from scipy import optimize

import src.sections as sections
from src.errors import BadTolerance, CapExceeded
from src.sections import p_fibonacci, p_fibonacci_table

TABLE = [2.0, 1.6180339887, 1.4655712318, 1.3802775690, 1.3247179572, 1.2851990332]


def test_p0_is_two():
    row = p_fibonacci(0)
    assert row.alpha == 2.0
    assert row.residual == 0.0
    assert row.iterations == 0


def test_known_rows():
    assert p_fibonacci(1).alpha == pytest.approx(1.6180339887, abs=1e-10)
    assert p_fibonacci(4).alpha == pytest.approx(1.3247179572, abs=1e-10)


def test_table_rows():
    rows = p_fibonacci_table(5)
    assert [r.p for r in rows] == list(range(6))
    for row, expected in zip(rows, TABLE):
        assert row.alpha == pytest.approx(expected, abs=1e-10)


def test_single_row_table():
    rows = p_fibonacci_table(0)
    assert len(rows) == 1
    assert (rows[0].p, rows[0].alpha) == (0, 2.0)


def test_full_table_properties():
    rows = p_fibonacci_table(64)
    for row in rows:
        assert 1.0 < row.alpha <= 2.0
        assert row.residual < 1e-13
        assert abs(row.alpha ** (row.p + 1) - row.alpha ** row.p - 1.0) < 1e-13
    for prev, nxt in zip(rows, rows[1:]):
        assert prev.alpha > nxt.alpha
    assert 1.0 < rows[-1].alpha < 1.06


def test_golden_and_plastic_identities():
    golden = p_fibonacci(1).alpha
    assert abs(golden ** 2 - golden - 1.0) < 1e-13
    plastic = p_fibonacci(4).alpha
    assert abs(plastic ** 3 - plastic - 1.0) < 1e-13


@pytest.mark.parametrize("tol", [0.0, 1e-6, 0.5, -1e-9])
def test_bad_tolerance(tol):
    with pytest.raises(BadTolerance):
        p_fibonacci(3, tol)


@pytest.mark.parametrize("p_max", [65, -1])
def test_table_cap(p_max):
    with pytest.raises(CapExceeded):
        p_fibonacci_table(p_max)


def test_failed_newton_falls_back_to_bisection(monkeypatch, caplog):
    expected = p_fibonacci(7).alpha

    def stalled(func, x0, **kwargs):
        return x0, SimpleNamespace(converged=False, iterations=50)

    monkeypatch.setattr(sections, "optimize", SimpleNamespace(bisect=optimize.bisect, newton=stalled))
    with caplog.at_level(logging.WARNING, logger="src.sections"):
        row = p_fibonacci(7, 1e-12)
    assert "Newton polish failed" in caplog.text
    assert row.alpha == pytest.approx(expected, abs=2e-12)
    assert row.residual < 1e-10
