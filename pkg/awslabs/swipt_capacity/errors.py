# Copyright Amazon.com, Inc. or its affiliates. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Exception hierarchy for the SWIPT capacity toolkit."""

from typing import Optional


class SwiptCapacityError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(SwiptCapacityError, ValueError):
    """An experiment configuration could not be read or failed validation."""


class QuadratureError(SwiptCapacityError, ArithmeticError):
    """A numerical integration did not reach the requested tolerance.

    Attributes:
        achieved: Error estimate actually reached.
        requested: Tolerance that was asked for.
    """

    def __init__(self, message: str, achieved: float, requested: float):
        """Initialize with the achieved and requested tolerances."""
        super().__init__(f'{message} (achieved {achieved:.3g}, requested {requested:.3g})')
        self.achieved = achieved
        self.requested = requested


class ConvergenceError(SwiptCapacityError, ArithmeticError):
    """An iterative solver stopped before meeting its stopping rule."""

    def __init__(self, message: str, iterations: Optional[int] = None):
        """Initialize with the number of iterations that were run."""
        super().__init__(message)
        self.iterations = iterations


class MonotonicityError(SwiptCapacityError, AssertionError):
    """The Blahut-Arimoto lower bound decreased between iterations."""


class ValidationFailure(SwiptCapacityError):
    """An oracle check of the Gaussian transition model exceeded its threshold.

    Attributes:
        report: The full validation table, failed rows included.
    """

    def __init__(self, message: str, report=None):
        """Initialize with the validation report."""
        super().__init__(message)
        self.report = report
