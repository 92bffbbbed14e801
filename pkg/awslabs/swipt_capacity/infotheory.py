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
"""Mutual information, input-law lower bounds and Blahut-Arimoto capacity estimates."""

import math
import numpy as np
from awslabs.swipt_capacity.channel import transition_moments
from awslabs.swipt_capacity.discretize import DiscreteChannel, discretize, input_nodes
from awslabs.swipt_capacity.errors import ConvergenceError, MonotonicityError, QuadratureError
from awslabs.swipt_capacity.models import (
    CapacityResult,
    ChannelConsts,
    InputLaw,
    LawKind,
    Method,
    QuadratureConfig,
)
from awslabs.swipt_capacity.stats import discretize_law
from awslabs.swipt_capacity.util import golden_section_maximize
from loguru import logger
from scipy import stats
from typing import List, NamedTuple, Optional, Tuple


BITS_PER_NAT = 1.0 / math.log(2.0)
CONSTRAINT_TOL = 1e-3
SHAPE_RANGE = (0.05, 50.0)
SHAPE_SCAN_POINTS = 9
LOG_SHAPE_TOL = 1e-3
MONOTONE_SLACK = 1e-9
MAX_DOUBLINGS = 64
MAX_BISECTIONS = 100
_MARGINAL_BLOCK = 4_000_000


class BlahutArimotoSolution(NamedTuple):
    """Outcome of the Blahut-Arimoto iteration on a discrete channel.

    Attributes:
        weights: Optimized input distribution.
        bits: Mutual information achieved by ``weights``.
        mean_cost: Expected cost under ``weights``.
        multiplier: Lagrange multiplier of the cost constraint, per unit cost.
        iterations: Total iterations over all multiplier values.
        converged: Whether the bound gap and the cost constraint were both met.
        bound_gap: Final gap between the upper and lower bounds, in bits.
        constraint_gap: Relative violation of the budget; a slack budget counts as met when
            the multiplier is zero.
        history: Lower bound in nats after each iteration of the last multiplier value.
    """

    weights: np.ndarray
    bits: float
    mean_cost: float
    multiplier: float
    iterations: int
    converged: bool
    bound_gap: float
    constraint_gap: float
    history: List[float]


def _law_nodes(law: InputLaw, c: ChannelConsts, quad: QuadratureConfig) -> np.ndarray:
    if law.kind == LawKind.DISCRETE:
        return np.unique(np.asarray(law.support, dtype=float))
    return input_nodes(c, law.mean, quad)


def marginal_pdf(
    y, law: InputLaw, c: ChannelConsts, quad: QuadratureConfig, check_convergence: bool = False
) -> np.ndarray:
    """Output density induced by an input law through the Gaussian transition law.

    Args:
        y: Evaluation points in W.
        law: Input law.
        c: Channel constants.
        quad: Grid controls for lumping continuous laws.
        check_convergence: Recompute on the refined grid and compare.

    Returns:
        Density values with the shape of ``y``.

    Raises:
        QuadratureError: If refinement changes the density by more than ``quad.rel_tol``.
    """
    y = np.asarray(y, dtype=float)
    nodes = _law_nodes(law, c, quad)
    weights = discretize_law(law, nodes)
    keep = weights > 0
    mu, var = transition_moments(nodes[keep], c)
    sd = np.sqrt(var)
    w = weights[keep]
    flat = y.ravel()
    out = np.empty_like(flat)
    block = max(1, _MARGINAL_BLOCK // w.size)
    for start in range(0, flat.size, block):
        chunk = flat[start : start + block]
        out[start : start + block] = stats.norm.pdf(chunk[:, None], mu, sd) @ w
    out = out.reshape(y.shape)
    if check_convergence and law.kind != LawKind.DISCRETE:
        refined = marginal_pdf(y, law, c, quad.refined())
        achieved = float(np.max(np.abs(refined - out)))
        requested = quad.rel_tol * float(np.max(refined))
        if achieved > requested:
            raise QuadratureError('marginal density did not converge', achieved, requested)
    return out


def _channel_for(law: InputLaw, c: ChannelConsts, quad: QuadratureConfig) -> DiscreteChannel:
    if law.kind == LawKind.DISCRETE:
        return discretize(c, None, quad, nodes=_law_nodes(law, c, quad))
    return discretize(c, law.mean, quad)


def mutual_information_discrete(weights, channel: DiscreteChannel) -> float:
    """Mutual information in bits of input weights on a discretized channel."""
    return channel.mutual_information(weights) * BITS_PER_NAT


def mutual_information(
    law: InputLaw,
    c: ChannelConsts,
    quad: QuadratureConfig,
    channel: Optional[DiscreteChannel] = None,
    check_convergence: bool = False,
) -> float:
    """Mutual information in bits between the input law and y_DC.

    Args:
        law: Input law.
        c: Channel constants.
        quad: Grid controls.
        channel: Prebuilt discretization to reuse, for instance across a shape search.
        check_convergence: Recompute with doubled grids and compare.

    Returns:
        Mutual information in bits, never negative.

    Raises:
        QuadratureError: If refinement changes the result by more than ``quad.rel_tol``.
    """
    if channel is None:
        channel = _channel_for(law, c, quad)
    bits = mutual_information_discrete(discretize_law(law, channel.u), channel)
    if check_convergence:
        refined = mutual_information(law, c, quad.refined())
        achieved = abs(refined - bits)
        requested = quad.rel_tol * max(refined, 1e-12)
        if achieved > requested:
            raise QuadratureError('mutual information did not converge', achieved, requested)
    return bits


def _constraint_gap(weights: np.ndarray, u: np.ndarray, mean: float) -> float:
    return abs(float(weights @ u) - mean) / mean


def optimize_gamma_shape(
    c: ChannelConsts,
    mean: float,
    quad: QuadratureConfig,
    channel: Optional[DiscreteChannel] = None,
) -> CapacityResult:
    """Best gamma input law of the given mean.

    The shape is scanned on a log grid over SHAPE_RANGE (plus the exponential law) and the
    best bracket is refined by golden-section search in log(alpha). Several interior peaks
    in the scan mark the result as not converged.
    """
    if channel is None:
        channel = discretize(c, mean, quad)

    def objective(log_alpha: float) -> float:
        weights = discretize_law(InputLaw.gamma(math.exp(log_alpha), mean), channel.u)
        return channel.mutual_information(weights) * BITS_PER_NAT

    grid = np.unique(
        np.append(np.linspace(*np.log(SHAPE_RANGE), SHAPE_SCAN_POINTS), 0.0)
    )
    scan = [objective(x) for x in grid]
    peaks = sum(
        1 for i in range(1, grid.size - 1) if scan[i] > scan[i - 1] and scan[i] >= scan[i + 1]
    )
    if peaks > 1:
        logger.warning(f'gamma shape scan has {peaks} interior maxima; result may be local')
    best = int(np.argmax(scan))
    search = golden_section_maximize(
        objective, grid[max(best - 1, 0)], grid[min(best + 1, grid.size - 1)], tol=LOG_SHAPE_TOL
    )
    candidates = list(zip(grid.tolist(), scan)) + search.evaluations
    log_alpha, bits = max(candidates, key=lambda item: item[1])
    law = InputLaw.gamma(math.exp(log_alpha), mean)
    gap = _constraint_gap(discretize_law(law, channel.u), channel.u, mean)
    converged = search.converged and peaks <= 1 and gap <= CONSTRAINT_TOL
    logger.debug(f'gamma shape {law.alpha:.4g} gives {bits:.6g} bits')
    return CapacityResult(
        method=Method.GAMMA,
        bits=max(0.0, bits),
        law=law,
        iterations=len(candidates),
        converged=converged,
        constraint_gap=gap,
    )


def lower_bound(
    kind: Method,
    c: ChannelConsts,
    mean: float,
    quad: QuadratureConfig,
    channel: Optional[DiscreteChannel] = None,
) -> CapacityResult:
    """Mutual information of a fixed input family, a lower bound on capacity.

    Args:
        kind: ``Method.GAMMA`` (shape optimized), ``Method.RAYLEIGH`` or ``Method.UNIFORM``.
        c: Channel constants.
        mean: Mean input power in W.
        quad: Grid controls.
        channel: Prebuilt discretization to reuse.
    """
    if kind == Method.GAMMA:
        return optimize_gamma_shape(c, mean, quad, channel)
    if kind == Method.RAYLEIGH:
        law = InputLaw.rayleigh(mean)
    elif kind == Method.UNIFORM:
        law = InputLaw.uniform(mean)
    else:
        raise ValueError(f'{kind.value} is not a fixed-family lower bound')
    if channel is None:
        channel = discretize(c, mean, quad)
    weights = discretize_law(law, channel.u)
    bits = channel.mutual_information(weights) * BITS_PER_NAT
    gap = _constraint_gap(weights, channel.u, mean)
    return CapacityResult(
        method=kind,
        bits=bits,
        law=law,
        iterations=1,
        converged=gap <= CONSTRAINT_TOL,
        constraint_gap=gap,
    )


def _iterate(
    channel: DiscreteChannel,
    cost: np.ndarray,
    multiplier: float,
    q: np.ndarray,
    tol: float,
    max_iter: int,
) -> Tuple[np.ndarray, int, bool, float, List[float]]:
    """Run the multiplicative update at a fixed multiplier until the bounds meet.

    The lower bound log sum_i q_i exp(D_i - multiplier * cost_i) is nondecreasing and the
    upper bound is max_i (D_i - multiplier * cost_i); ``tol`` is in nats.
    """
    history: List[float] = []
    gap = math.inf
    for iteration in range(1, max_iter + 1):
        g = channel.divergences(channel.output_distribution(q)) - multiplier * cost
        upper = float(g.max())
        tilted = q * np.exp(g - upper)
        total = float(tilted.sum())
        lower = upper + math.log(total)
        if history and lower < history[-1] - MONOTONE_SLACK * max(1.0, abs(lower)):
            raise MonotonicityError(
                f'lower bound fell from {history[-1]:.12g} to {lower:.12g} '
                f'at iteration {iteration}'
            )
        history.append(lower)
        q = tilted / total
        gap = upper - lower
        if gap < tol:
            return q, iteration, True, gap, history
    return q, max_iter, False, gap, history


def blahut_arimoto_matrix(
    transition,
    cost=None,
    target: Optional[float] = None,
    tol: float = 1e-6,
    max_iter: int = 10000,
    initial=None,
) -> BlahutArimotoSolution:
    """Capacity of a discrete memoryless channel, optionally under a mean-cost constraint.

    The constrained problem is solved through its Lagrangian: the multiplier is zero when the
    unconstrained optimum already meets the budget, otherwise it is bracketed by doubling and
    bisected until the mean cost is within CONSTRAINT_TOL of ``target`` relatively. Each solve
    starts from the previous solution.

    Args:
        transition: Row-stochastic matrix (dense or sparse) or a ``DiscreteChannel``.
        cost: Nonnegative cost of every input letter; required with ``target``.
        target: Budget on the expected cost.
        tol: Stopping gap between the upper and lower bounds, in bits.
        max_iter: Iteration cap for each multiplier value.
        initial: Starting input distribution, uniform by default.

    Returns:
        The solution at the final multiplier.

    Raises:
        ValueError: If the budget is below the cheapest letter.
        ConvergenceError: If no multiplier brings the mean cost under the budget.
        MonotonicityError: If the lower bound decreases.
    """
    channel = (
        transition
        if isinstance(transition, DiscreteChannel)
        else DiscreteChannel.from_matrix(transition, cost)
    )
    n = channel.n_inputs
    q = np.full(n, 1.0 / n) if initial is None else np.asarray(initial, dtype=float)
    if q.shape != (n,) or np.any(q < 0) or q.sum() <= 0:
        raise ValueError('initial must be a nonnegative vector with one entry per input')
    q = q / q.sum()
    tol_nats = tol / BITS_PER_NAT

    if target is None:
        zeros = np.zeros(n)
        q, iterations, converged, gap, history = _iterate(
            channel, zeros, 0.0, q, tol_nats, max_iter
        )
        mean_cost = float(q @ channel.u) if cost is not None else 0.0
        return BlahutArimotoSolution(
            q,
            channel.mutual_information(q) * BITS_PER_NAT,
            mean_cost,
            0.0,
            iterations,
            converged,
            gap * BITS_PER_NAT,
            0.0,
            history,
        )

    b = (np.asarray(cost, dtype=float) if cost is not None else channel.u) / target
    if b.shape != (n,) or np.any(b < 0):
        raise ValueError('cost must be a nonnegative vector with one entry per input')
    if b.min() > 1.0 + CONSTRAINT_TOL:
        raise ValueError('the budget is below the cheapest input letter')

    total_iterations = 0

    def solve(multiplier: float, start: np.ndarray):
        nonlocal total_iterations
        q_m, iterations, ok, gap, history = _iterate(
            channel, b, multiplier, start, tol_nats, max_iter
        )
        total_iterations += iterations
        return q_m, ok, gap, history, float(q_m @ b)

    multiplier = 0.0
    q, ok, gap, history, mean_b = solve(0.0, q)
    if mean_b > 1.0 + CONSTRAINT_TOL:
        lo, hi = 0.0, 1.0
        for _ in range(MAX_DOUBLINGS):
            q, ok, gap, history, mean_b = solve(hi, q)
            if mean_b <= 1.0:
                break
            lo, hi = hi, 2.0 * hi
        else:
            raise ConvergenceError('no multiplier meets the cost budget', total_iterations)
        multiplier = hi
        for _ in range(MAX_BISECTIONS):
            if abs(mean_b - 1.0) <= 0.5 * CONSTRAINT_TOL:
                break
            mid = 0.5 * (lo + hi)
            q, ok, gap, history, mean_b = solve(mid, q)
            multiplier = mid
            if mean_b > 1.0:
                lo = mid
            else:
                hi = mid
    constraint_gap = abs(mean_b - 1.0) if multiplier > 0 else max(0.0, mean_b - 1.0)
    converged = ok and constraint_gap <= CONSTRAINT_TOL
    logger.debug(
        f'Blahut-Arimoto: multiplier {multiplier:.6g}, mean cost {mean_b * target:.6g}, '
        f'{total_iterations} iterations'
    )
    return BlahutArimotoSolution(
        q,
        channel.mutual_information(q) * BITS_PER_NAT,
        mean_b * target,
        multiplier / target,
        total_iterations,
        converged,
        gap * BITS_PER_NAT,
        constraint_gap,
        history,
    )


def blahut_arimoto(
    c: ChannelConsts,
    mean: float,
    quad: QuadratureConfig,
    tol: float = 1e-3,
    max_iter: int = 5000,
    channel: Optional[DiscreteChannel] = None,
    initial: Optional[InputLaw] = None,
    exact: bool = False,
    method: Method = Method.BLAHUT_ARIMOTO,
) -> CapacityResult:
    """Capacity under the mean-power budget on the discretized channel.

    Args:
        c: Channel constants.
        mean: Mean input power budget in W.
        quad: Grid controls.
        tol: Stopping gap between the Blahut-Arimoto bounds, in bits.
        max_iter: Iteration cap for each multiplier value.
        channel: Prebuilt discretization to reuse.
        initial: Input law to start from, the exponential law by default.
        exact: Fill the transition matrix from the exact density.
        method: Label of the returned result.

    Returns:
        The optimized discrete input law and its mutual information.
    """
    if channel is None:
        channel = discretize(c, mean, quad, exact=exact)
    start = discretize_law(initial or InputLaw.gamma(1.0, mean), channel.u)
    # Letters with zero starting weight would stay at zero forever.
    start = (1.0 - 1e-6) * start + 1e-6 / start.size
    solution = blahut_arimoto_matrix(
        channel, channel.u, target=mean, tol=tol, max_iter=max_iter, initial=start
    )
    if not solution.converged:
        logger.warning(
            f'Blahut-Arimoto stopped with bound gap {solution.bound_gap:.3g} bits '
            f'after {solution.iterations} iterations'
        )
    law = InputLaw.discrete(channel.u, solution.weights)
    return CapacityResult(
        method=method,
        bits=max(0.0, solution.bits),
        law=law,
        iterations=solution.iterations,
        converged=solution.converged,
        constraint_gap=solution.constraint_gap,
        upper_gap_bits=solution.bound_gap,
        multiplier=solution.multiplier,
    )
