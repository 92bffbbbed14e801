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
"""Small numerical helpers shared by the solvers."""

import math
import numpy as np
from typing import Callable, List, NamedTuple, Tuple


INV_PHI = 2.0 / (1.0 + math.sqrt(5.0))


class GoldenSectionResult(NamedTuple):
    """Outcome of a golden-section search.

    Attributes:
        x: Abscissa with the largest evaluated value.
        value: Objective at ``x``.
        iterations: Number of bracket reductions performed.
        converged: Whether the bracket shrank below the tolerance.
        evaluations: Every (x, f(x)) pair evaluated, in order.
    """

    x: float
    value: float
    iterations: int
    converged: bool
    evaluations: List[Tuple[float, float]]


def golden_section_maximize(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-3,
    max_iter: int = 100,
) -> GoldenSectionResult:
    """Maximize a unimodal function on [lo, hi] by golden-section search.

    Args:
        f: Objective.
        lo: Left end of the bracket.
        hi: Right end of the bracket.
        tol: Stop once the bracket is narrower than this.
        max_iter: Maximum number of bracket reductions.

    Returns:
        The best point found, which may be a bracket end if the objective is largest there.
    """
    if hi < lo:
        raise ValueError('empty bracket')
    evaluations: List[Tuple[float, float]] = []

    def evaluate(x: float) -> float:
        fx = f(x)
        evaluations.append((x, fx))
        return fx

    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1 = evaluate(x1)
    f2 = evaluate(x2)
    iteration = 0
    while iteration < max_iter and hi - lo > tol:
        if f1 > f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INV_PHI * (hi - lo)
            f1 = evaluate(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INV_PHI * (hi - lo)
            f2 = evaluate(x2)
        iteration += 1

    finite = [(x, fx) for x, fx in evaluations if not math.isnan(fx)]
    if not finite:
        return GoldenSectionResult(float('nan'), float('nan'), iteration, False, evaluations)
    x_best, f_best = max(finite, key=lambda item: item[1])
    converged = hi - lo <= tol and len(finite) == len(evaluations)
    return GoldenSectionResult(x_best, f_best, iteration, converged, evaluations)


def substream(seed: int, shard: int) -> np.random.Generator:
    """Independent generator for one shard of a seeded computation."""
    return np.random.default_rng(np.random.SeedSequence([seed, shard]))


def shard_sizes(count: int, shards: int) -> List[int]:
    """Split ``count`` draws as evenly as possible over ``shards`` shards."""
    if shards < 1:
        raise ValueError('shards must be positive')
    base, extra = divmod(count, shards)
    return [base + (1 if i < extra else 0) for i in range(shards)]
