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

"""Errors raised by the m-spiral kernel."""


class SpiralError(ValueError):
    """Base class, every computation error of the package derives from it."""


class RatioOutOfRange(SpiralError):
    pass


class BadSide(SpiralError):
    pass


class BadPoint(SpiralError):
    pass


class ToleranceOutOfRange(SpiralError):
    pass


class BadTolerance(SpiralError):
    pass


class CapExceeded(SpiralError):
    pass


class MaxIterations(SpiralError):
    """
    Iteration budget exhausted. `best` holds the last estimate.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class DegenerateLines(SpiralError):
    pass


class TooFewPoints(SpiralError):
    pass


class InsufficientCoverage(SpiralError):
    pass


class InputNotOrdered(SpiralError):
    pass


class NoConvergence(SpiralError):
    """
    Fit did not converge. `result` holds the best iterate (converged=False).
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class BadNoise(SpiralError):
    pass


class BadOptions(SpiralError):
    pass


class RenderMismatch(SpiralError):
    pass


class UsageError(BadOptions):
    """A command-line flag value that cannot be parsed."""
