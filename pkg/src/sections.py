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

"""p-Fibonacci numbers: the root in (1, 2] of x^(p+1) - x^p - 1."""

import logging
from dataclasses import dataclass

from scipy import optimize

from src.errors import BadTolerance, CapExceeded

logger = logging.getLogger(__name__)

PFIB_TOL = 1e-13
P_MAX = 64
BRACKET = (1.0 + 1e-9, 2.0)
BRACKET_WIDTH = 1e-6


@dataclass(frozen=True)
class PFibResult:
    p: int
    alpha: float
    residual: float
    iterations: int


def _poly(x, p):
    return x ** p * (x - 1.0) - 1.0


def _poly_prime(x, p):
    return x ** (p - 1) * ((p + 1) * x - p) if p else 1.0


def p_fibonacci(p, tol=PFIB_TOL):
    """
    Bracket the root by bisection, then polish it with Newton steps. If
    Newton fails the bracket is bisected down to tol instead.

    Args:
        p: non-negative integer order.
        tol: step tolerance on the root, in (0, 1e-6).
    """
    if not 0.0 < tol < 1e-6:
        raise BadTolerance(f"tol must be in (0, 1e-6), got {tol!r}")
    if int(p) != p or p < 0:
        raise CapExceeded(f"p must be a non-negative integer, got {p!r}")
    p = int(p)
    if p == 0:
        return PFibResult(0, 2.0, 0.0, 0)

    lo, hi = BRACKET
    coarse, bis = optimize.bisect(_poly, lo, hi, args=(p,), xtol=BRACKET_WIDTH, full_output=True)
    root, newt = optimize.newton(_poly, coarse, fprime=_poly_prime, args=(p,), tol=tol, rtol=0.0,
                                 maxiter=50, full_output=True, disp=False)
    if not newt.converged or not 1.0 < root <= 2.0:
        logger.warning("p_fibonacci: Newton polish failed for p=%d, refining the bisection bracket", p)
        lo, hi = max(lo, coarse - 2 * BRACKET_WIDTH), min(hi, coarse + 2 * BRACKET_WIDTH)
        root, newt = optimize.bisect(_poly, lo, hi, args=(p,), xtol=tol, full_output=True)
    iterations = bis.iterations + newt.iterations
    residual = abs(_poly(root, p))
    logger.debug("p_fibonacci: p=%d alpha=%r residual=%.3e after %d iterations", p, root, residual, iterations)
    return PFibResult(p, float(root), float(residual), int(iterations))


def p_fibonacci_table(p_max, tol=PFIB_TOL):
    if int(p_max) != p_max or not 0 <= p_max <= P_MAX:
        raise CapExceeded(f"p_max must be an integer in [0, {P_MAX}], got {p_max!r}")
    return [p_fibonacci(p, tol) for p in range(int(p_max) + 1)]
