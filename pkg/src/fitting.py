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

"""Recover the growth ratio and the pole of a spiral from sampled points.

Model: log r = log r0 + (theta / (pi/2)) * log m + g(theta) about a candidate
pole, where g repeats every quarter turn. The whirl maps each arc onto the
next by a quarter turn about the pole, so g is exact for the quarter-arc
spiral; it is carried as a short Fourier series. For a fixed pole the model
is linear and solved by least squares. The pole is searched with a
multi-start Nelder-Mead on the unexplained share of the log-radius variance,
restricted to poles the samples turn around by at least two quarter turns.
"""

import logging
import math
import os
from concurrent import futures
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from scipy import optimize

from src.errors import (BadNoise, BadOptions, BadPoint, InputNotOrdered, InsufficientCoverage, NoConvergence,
                        TooFewPoints)
from src.spiral import Point, arc_geometry, whirl_squares

logger = logging.getLogger(__name__)

MIN_POINTS = 8
QUARTER_TURN = math.pi / 2
MAX_BACKSTEP = math.pi / 4
MAX_SIMPLEX_ITERATIONS = 500
RELATIVE_DECREASE = 1e-12
SIMPLEX_XTOL = 1e-12
SIMPLEX_STEP = 0.5
DEFAULT_SYNTH_SQUARES = 8
MIN_SYNTH_SQUARES = 3
SMALLEST_SIDE = 1e-7
INIT_DISAGREEMENT = 0.1
MIN_SPAN = 2 * QUARTER_TURN
PERIODIC_HARMONICS = 3
INNER_END_SHARE = 10


@dataclass(frozen=True)
class SampleSet:
    """
    Ordered spiral samples. noise_sigma and seed are only set for synthetic data.
    """
    points: Tuple[Point, ...]
    noise_sigma: float = 0.0
    seed: Optional[int] = None

    def __post_init__(self):
        pts = tuple(p if isinstance(p, Point) else Point(*p) for p in self.points)
        if len(pts) < MIN_POINTS:
            raise TooFewPoints(f"at least {MIN_POINTS} samples are required, got {len(pts)}")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_array(cls, xy, noise_sigma=0.0, seed=None):
        xy = np.asarray(xy, dtype=float)
        if xy.ndim != 2 or xy.shape[1] != 2:
            raise BadPoint(f"samples must be an (n, 2) array, got shape {xy.shape}")
        return cls(tuple(Point(x, y) for x, y in xy), noise_sigma, seed)

    @property
    def xy(self):
        return np.array([p.as_tuple() for p in self.points], dtype=float)

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class FitResult:
    m_hat: float
    pole_hat: Point
    r0_hat: float
    residual_norm: float
    iterations: int
    converged: bool
    m_init: float


def _synth_square_count(m):
    # smallest side L/m^(k-1) stays >= SMALLEST_SIDE * L
    k_max = int(math.floor(math.log(1.0 / SMALLEST_SIDE) / math.log(m))) + 1
    return max(MIN_SYNTH_SQUARES, min(DEFAULT_SYNTH_SQUARES, k_max))


def synth_samples(spec, n_points, noise_sigma=0.0, seed=0, n_squares=None):
    """
    Sample the quarter-arc spiral with an equal share of points per arc,
    ordered from the outer arc inward, plus isotropic Gaussian noise.

    Args:
        spec: SpiralSpec of the ground truth.
        n_points: number of samples, at least 8.
        noise_sigma: noise scale relative to L.
        seed: seed of the numpy generator.
        n_squares: number of arcs. Defaults to 8, clamped for large m.
    """
    if int(n_points) != n_points or n_points < MIN_POINTS:
        raise TooFewPoints(f"n_points must be an integer >= {MIN_POINTS}, got {n_points!r}")
    if not (math.isfinite(noise_sigma) and noise_sigma >= 0.0):
        raise BadNoise(f"noise_sigma must be finite and >= 0, got {noise_sigma!r}")
    n_points = int(n_points)
    k = _synth_square_count(spec.m) if n_squares is None else n_squares
    arcs = [arc_geometry(sq) for sq in whirl_squares(spec, k)]

    position = np.arange(n_points) * (len(arcs) / (n_points - 1))
    index = np.minimum(np.floor(position).astype(int), len(arcs) - 1)
    frac = position - index
    cx = np.array([a.center.x for a in arcs])[index]
    cy = np.array([a.center.y for a in arcs])[index]
    radius = np.array([a.radius for a in arcs])[index]
    angle = np.array([a.start_angle for a in arcs])[index] - frac * QUARTER_TURN
    xy = np.column_stack((cx + radius * np.cos(angle), cy + radius * np.sin(angle)))

    if noise_sigma > 0.0:
        rng = np.random.default_rng(seed)
        xy = xy + rng.normal(0.0, noise_sigma * spec.L, size=xy.shape)
    return SampleSet.from_array(xy, noise_sigma=float(noise_sigma), seed=seed)


def _polar(xy, pole):
    d = xy - np.asarray(pole, dtype=float)
    return np.hypot(d[:, 0], d[:, 1]), np.unwrap(np.arctan2(d[:, 1], d[:, 0]))


def _harmonic_count(n, harmonics):
    # keep at least as many samples as twice the model's coefficients
    return max(0, min(int(harmonics), n // 4 - 1))


def _regress(xy, pole, harmonics=PERIODIC_HARMONICS):
    """
    Least-squares fit of log r against quarter turns plus a Fourier series
    of period one quarter turn. Returns (slope, fitted, residuals, ss_tot)
    or None when the pole is degenerate or covers less than MIN_SPAN.
    """
    r, theta = _polar(xy, pole)
    if np.any(r <= 0.0) or theta.max() - theta.min() < MIN_SPAN:
        return None
    turns = theta / QUARTER_TURN
    log_r = np.log(r)
    columns = [np.ones_like(turns), turns]
    for k in range(1, _harmonic_count(len(turns), harmonics) + 1):
        columns += [np.cos(2 * math.pi * k * turns), np.sin(2 * math.pi * k * turns)]
    design = np.column_stack(columns)
    coef = np.linalg.lstsq(design, log_r, rcond=None)[0]
    fitted = design @ coef
    centered = log_r - log_r.mean()
    return coef[1], fitted, log_r - fitted, float(centered @ centered)


def _objective(pole, xy, harmonics):
    """unexplained share of the log-radius variance, inf off the admissible region"""
    fit = _regress(xy, pole, harmonics)
    if fit is None or not fit[3] > 0.0:
        return np.inf
    return float(fit[2] @ fit[2]) / fit[3]


def quarter_turn_ratio(samples, pole):
    """
    Median ratio of radii at angles a quarter turn apart, read off a linear
    interpolation of log r over the sorted angles.
    """
    xy = samples.xy if isinstance(samples, SampleSet) else np.asarray(samples, dtype=float)
    pole = pole.as_tuple() if isinstance(pole, Point) else pole
    r, theta = _polar(xy, pole)
    if np.any(r <= 0.0):
        raise InsufficientCoverage("a sample coincides with the pole")
    order = np.argsort(theta, kind="stable")
    theta, log_r = theta[order], np.log(r[order])
    span = theta[-1] - theta[0]
    if span < 2 * QUARTER_TURN:
        raise InsufficientCoverage(f"samples cover {span:.3f} rad about the pole, need at least two quarter turns")
    shifted = theta + QUARTER_TURN
    mask = shifted <= theta[-1]
    gain = np.interp(shifted[mask], theta, log_r) - log_r[mask]
    return float(math.exp(abs(np.median(gain))))


def _canonical_frame(xy):
    """
    Centroid, median radius and the angle of the first sample. Fitting runs
    in this frame so rigid motions and scaling of the input drop out.
    """
    center = xy.mean(axis=0)
    d = xy - center
    rho = float(np.median(np.hypot(d[:, 0], d[:, 1])))
    if not rho > 0.0:
        raise InsufficientCoverage("samples collapse to a single point")
    phi = math.atan2(d[0, 1], d[0, 0]) if np.any(d[0] != 0.0) else 0.0
    c, s = math.cos(phi), math.sin(phi)
    rotation = np.array([[c, -s], [s, c]])
    return center, rho, rotation


def _inner_end(xy):
    """
    Mean of the samples at the end with the shorter steps. Spirals sampled
    evenly per arc crowd there around the pole.
    """
    k = max(3, len(xy) // INNER_END_SHARE)
    steps = np.hypot(*np.diff(xy, axis=0).T)
    head, tail = steps[:k - 1].mean(), steps[-(k - 1):].mean()
    return xy[-k:].mean(axis=0) if tail <= head else xy[:k].mean(axis=0)


def _descend(xy, start, max_iterations, harmonics):
    simplex = np.array([start, start + (SIMPLEX_STEP, 0.0), start + (0.0, SIMPLEX_STEP)])
    f_start = _objective(start, xy, harmonics)
    fatol = RELATIVE_DECREASE * f_start if np.isfinite(f_start) and f_start > 0.0 else RELATIVE_DECREASE
    return optimize.minimize(_objective, start, args=(xy, harmonics), method="Nelder-Mead",
                             options={"initial_simplex": simplex, "maxiter": max_iterations,
                                      "xatol": SIMPLEX_XTOL, "fatol": fatol})


def _check_ordering(xy, pole, max_backstep):
    _, theta = _polar(xy, pole)
    direction = 1.0 if theta[-1] >= theta[0] else -1.0
    backstep = -np.min(np.diff(theta) * direction)
    if backstep > max_backstep:
        raise InputNotOrdered(f"unwrapped angles step back by {backstep:.3f} rad, samples are not ordered "
                              "along the spiral")


def fit_spiral(samples, init_pole=None, init_m=None, max_backstep=MAX_BACKSTEP,
               max_iterations=MAX_SIMPLEX_ITERATIONS, strict=False, workers=None,
               harmonics=PERIODIC_HARMONICS):
    """
    Fit m, pole and r0 to ordered samples.

    Args:
        samples: SampleSet ordered along the spiral.
        init_pole: first start of the pole search, the mean of the inner end if absent.
        init_m: reported initial ratio, estimated by quarter_turn_ratio if absent.
        max_backstep: largest angular step against the winding that still counts as ordered.
        max_iterations: simplex iterations per start.
        strict: raise NoConvergence instead of returning a non-converged result.
        workers: thread count for the multi-start.
        harmonics: Fourier terms of the quarter-turn periodic correction, 0 for the plain log model.
    """
    if not isinstance(samples, SampleSet):
        samples = SampleSet.from_array(samples)
    if int(harmonics) != harmonics or harmonics < 0:
        raise BadOptions(f"harmonics must be a non-negative integer, got {harmonics!r}")
    raw = samples.xy
    center, rho, rotation = _canonical_frame(raw)
    xy = (raw - center) @ rotation / rho

    def to_frame(p):
        return (np.asarray(p.as_tuple() if isinstance(p, Point) else p, dtype=float) - center) @ rotation / rho

    def from_frame(z):
        return Point(*(center + rho * (rotation @ z)))

    first = to_frame(init_pole) if init_pole is not None else _inner_end(xy)
    starts = [first, np.zeros(2)] + [np.array(o, dtype=float)
                                     for o in ((1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0))]

    if init_m is None:
        try:
            init_m = quarter_turn_ratio(xy, first)
        except InsufficientCoverage:
            fit = _regress(xy, first, harmonics)
            init_m = math.exp(abs(fit[0])) if fit is not None else float("nan")
            logger.info("fit_spiral: quarter-turn initializer unavailable, regression gives m=%r", init_m)

    max_workers = workers or min(len(starts), os.cpu_count() or 1)
    with futures.ThreadPoolExecutor(max_workers=max_workers) as tp:
        runs = list(tp.map(lambda s: _descend(xy, s, max_iterations, harmonics), starts))
    for index, res in enumerate(runs):
        logger.debug("fit_spiral: start %d objective %.6e after %d iterations", index, res.fun, res.nit)
    best_index = min(range(len(runs)), key=lambda k: (runs[k].fun, k))
    best = runs[best_index]
    if not np.isfinite(best.fun):
        raise InsufficientCoverage(f"no start sees the samples turn by at least {MIN_SPAN:.3f} rad")
    logger.info("fit_spiral: best start %d, objective %.6e", best_index, best.fun)

    slope, fitted, residuals, _ = _regress(xy, best.x, harmonics)
    pole = from_frame(best.x)
    _check_ordering(raw, pole.as_tuple(), max_backstep)

    result = FitResult(
        m_hat=float(math.exp(abs(slope))),
        pole_hat=pole,
        r0_hat=float(rho * math.exp(fitted[0])),
        residual_norm=float(math.sqrt(np.mean(residuals ** 2))),
        iterations=int(best.nit),
        converged=bool(best.success),
        m_init=float(init_m),
    )
    if not result.converged:
        logger.warning("fit_spiral: no convergence after %d iterations: %s", best.nit, best.message)
        if strict:
            raise NoConvergence(f"pole search did not converge: {best.message}", result=result)
    if math.isfinite(result.m_init) and abs(result.m_hat - result.m_init) > INIT_DISAGREEMENT * result.m_init:
        logger.warning("fit_spiral: fitted m=%.6g disagrees with the quarter-turn estimate %.6g",
                       result.m_hat, result.m_init)
    return result


def load_samples_csv(source):
    """
    Read x,y samples from CSV. A non-numeric first row is taken as header.
    """
    frame = pd.read_csv(source, header=None, dtype=str, skipinitialspace=True)
    if frame.shape[1] < 2:
        raise BadPoint(f"expected at least two columns x,y, got {frame.shape[1]}")
    values = frame.iloc[:, :2].apply(pd.to_numeric, errors="coerce")
    if values.iloc[0].isna().any():
        values = values.iloc[1:]
    if values.isna().any().any():
        raise BadPoint("sample file contains non-numeric values")
    return SampleSet.from_array(values.to_numpy(dtype=float))
