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

import io
import math

import numpy as np
import pytest

from src.errors import (BadNoise, BadOptions, BadPoint, InputNotOrdered, InsufficientCoverage, NoConvergence,
                        TooFewPoints)
from src.fitting import (PERIODIC_HARMONICS, SampleSet, _objective, fit_spiral, load_samples_csv, quarter_turn_ratio,
                         synth_samples)
from src.spiral import Point, arc_geometry, make_spec, pole_closed, whirl_squares
from src.verify import DEFAULT_GRID, GOLDEN

# Bounds on the bias left by the log-radius model, with margin.
M_TOL = 5e-3
POLE_TOL = 2e-2


def test_noiseless_points_on_arcs():
    spec = make_spec(GOLDEN)
    samples = synth_samples(spec, 120)
    arcs = [arc_geometry(sq) for sq in whirl_squares(spec, 8)]
    for p in samples.points:
        gap = min(abs(p.distance(a.center) - a.radius) for a in arcs)
        assert gap < 1e-12


def test_samples_start_outside_and_end_inside():
    spec = make_spec(2.0)
    samples = synth_samples(spec, 80)
    assert samples.points[0].distance(Point(-0.5, -0.5)) < 1e-15
    pole = pole_closed(spec).point
    assert samples.points[-1].distance(pole) < samples.points[0].distance(pole)


def test_same_seed_same_samples():
    spec = make_spec(1.33)
    a = synth_samples(spec, 50, noise_sigma=0.01, seed=7)
    b = synth_samples(spec, 50, noise_sigma=0.01, seed=7)
    c = synth_samples(spec, 50, noise_sigma=0.01, seed=8)
    np.testing.assert_array_equal(a.xy, b.xy)
    assert not np.array_equal(a.xy, c.xy)
    assert a.seed == 7 and a.noise_sigma == 0.01


def test_too_few_points():
    with pytest.raises(TooFewPoints):
        synth_samples(make_spec(2.0), 7)
    with pytest.raises(TooFewPoints):
        SampleSet.from_array(np.zeros((5, 2)))


@pytest.mark.parametrize("sigma", [-0.1, math.nan, math.inf])
def test_bad_noise(sigma):
    with pytest.raises(BadNoise):
        synth_samples(make_spec(2.0), 20, noise_sigma=sigma)


def test_sample_set_rejects_bad_shape():
    with pytest.raises(BadPoint):
        SampleSet.from_array(np.zeros((10, 3)))


@pytest.mark.parametrize("m", [1.0001, 1.33, GOLDEN, 2.0])
def test_quarter_turn_ratio_at_true_pole(m):
    spec = make_spec(m)
    samples = synth_samples(spec, 400)
    estimate = quarter_turn_ratio(samples, pole_closed(spec).point)
    assert estimate == pytest.approx(m, rel=0.02)


def test_quarter_turn_ratio_needs_coverage():
    angles = np.linspace(0.0, math.pi / 3, 12)
    samples = SampleSet.from_array(np.column_stack((np.cos(angles), np.sin(angles))))
    with pytest.raises(InsufficientCoverage):
        quarter_turn_ratio(samples, Point(0.0, 0.0))


# Relative error of log m for noiseless round trips. The periodic correction
# absorbs the piecewise-circular shape, what is left is its Fourier tail.
LOG_M_TOL = {1.01: 0.05, 60.0: 0.05}
DEFAULT_LOG_M_TOL = 0.02


@pytest.mark.parametrize("m", DEFAULT_GRID)
def test_noiseless_round_trip(m):
    spec = make_spec(m)
    result = fit_spiral(synth_samples(spec, 400))
    assert abs(math.log(result.m_hat) / math.log(m) - 1.0) < LOG_M_TOL.get(m, DEFAULT_LOG_M_TOL)
    assert result.pole_hat.distance(pole_closed(spec).point) < POLE_TOL * spec.L
    assert result.residual_norm >= 0.0


def test_far_start_does_not_run_away():
    spec = make_spec(2.0)
    samples = synth_samples(spec, 300)
    result = fit_spiral(samples, init_pole=Point(1e6, -1e6))
    assert result.m_hat == pytest.approx(2.0, rel=M_TOL)
    assert result.pole_hat.distance(pole_closed(spec).point) < POLE_TOL * spec.L


def test_objective_rejects_poles_outside_the_winding():
    xy = synth_samples(make_spec(GOLDEN), 200).xy
    assert _objective(np.array([1e3, 1e3]), xy, PERIODIC_HARMONICS) == math.inf
    assert _objective(np.asarray(pole_closed(make_spec(GOLDEN)).point.as_tuple()), xy, PERIODIC_HARMONICS) < 1e-3


def test_plain_log_model():
    spec = make_spec(2.0)
    result = fit_spiral(synth_samples(spec, 400), harmonics=0)
    assert result.m_hat == pytest.approx(2.0, rel=M_TOL)
    assert result.pole_hat.distance(pole_closed(spec).point) < POLE_TOL * spec.L


@pytest.mark.parametrize("harmonics", [-1, 1.5])
def test_bad_harmonics(harmonics):
    with pytest.raises(BadOptions):
        fit_spiral(synth_samples(make_spec(2.0), 50), harmonics=harmonics)


def test_fit_from_true_pole():
    spec = make_spec(GOLDEN, 2.0, Point(1.0, 1.0))
    pole = pole_closed(spec).point
    result = fit_spiral(synth_samples(spec, 300), init_pole=pole, init_m=1.5)
    assert result.m_init == 1.5
    assert result.m_hat == pytest.approx(GOLDEN, rel=M_TOL)
    assert result.pole_hat.distance(pole) < POLE_TOL * spec.L


def test_noisy_fit():
    spec = make_spec(2.0)
    for seed in range(20):
        samples = synth_samples(spec, 200, noise_sigma=0.01, seed=seed, n_squares=3)
        assert abs(fit_spiral(samples).m_hat - 2.0) < 0.05


def test_scale_equivariance():
    samples = synth_samples(make_spec(GOLDEN), 200, noise_sigma=0.002, seed=3)
    base = fit_spiral(samples)
    scaled = fit_spiral(SampleSet.from_array(samples.xy * 2.0))
    assert abs(scaled.m_hat - base.m_hat) < 1e-10
    assert scaled.pole_hat.x == pytest.approx(2.0 * base.pole_hat.x, rel=1e-12, abs=1e-12)
    assert scaled.pole_hat.y == pytest.approx(2.0 * base.pole_hat.y, rel=1e-12, abs=1e-12)
    assert scaled.r0_hat == pytest.approx(2.0 * base.r0_hat, rel=1e-12)


def test_rigid_motion_equivariance():
    samples = synth_samples(make_spec(1.33), 200)
    base = fit_spiral(samples)
    xy = samples.xy
    moved = np.column_stack((-xy[:, 1], xy[:, 0])) + (0.25, -0.5)
    result = fit_spiral(SampleSet.from_array(moved))
    assert abs(result.m_hat - base.m_hat) < 1e-8
    expected = Point(-base.pole_hat.y + 0.25, base.pole_hat.x - 0.5)
    assert result.pole_hat.distance(expected) < 1e-8


def test_fit_is_deterministic():
    samples = synth_samples(make_spec(2.0), 150, noise_sigma=0.005, seed=1, n_squares=5)
    assert fit_spiral(samples) == fit_spiral(samples)


def test_shuffled_input_is_rejected():
    samples = synth_samples(make_spec(GOLDEN), 100)
    order = np.random.default_rng(0).permutation(len(samples))
    with pytest.raises(InputNotOrdered):
        fit_spiral(SampleSet.from_array(samples.xy[order]))


def test_strict_fit_reports_best_iterate():
    spec = make_spec(2.0)
    samples = synth_samples(spec, 100)
    with pytest.raises(NoConvergence) as info:
        fit_spiral(samples, init_pole=pole_closed(spec).point, max_iterations=1, strict=True)
    assert info.value.result is not None
    assert not info.value.result.converged


def test_non_strict_fit_returns_flag():
    spec = make_spec(2.0)
    result = fit_spiral(synth_samples(spec, 100), init_pole=pole_closed(spec).point, max_iterations=1)
    assert not result.converged


def test_load_csv_with_and_without_header():
    body = "".join(f"{math.cos(t)!r},{math.sin(t)!r}\n" for t in np.linspace(0, 3, 10))
    with_header = load_samples_csv(io.StringIO("x,y\n" + body))
    without_header = load_samples_csv(io.StringIO(body))
    assert len(with_header) == 10
    np.testing.assert_array_equal(with_header.xy, without_header.xy)


def test_load_csv_rejects_text():
    body = "x,y\n" + "1,2\n" * 8 + "a,b\n"
    with pytest.raises(BadPoint):
        load_samples_csv(io.StringIO(body))


def test_load_csv_needs_two_columns():
    with pytest.raises(BadPoint):
        load_samples_csv(io.StringIO("1\n" * 10))
