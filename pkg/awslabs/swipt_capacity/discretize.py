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
"""Discretization of the Gaussian transition law on adapted (u, y) grids.

Input nodes are spaced uniformly in the stabilized coordinate t(u) = integral of d mu / sigma,
so that neighbouring rows of the transition matrix differ by a fixed fraction of their width.
Each row keeps only the outputs within span_sigmas of its mean, giving a banded sparse matrix.
"""

import math
import numpy as np
from awslabs.swipt_capacity.channel import transition_moments, transition_pdf_exact
from awslabs.swipt_capacity.errors import QuadratureError
from awslabs.swipt_capacity.models import ChannelConsts, QuadratureConfig
from loguru import logger
from scipy import sparse, special
from typing import Optional


PROBE_NODES = 20001
SMALLEST_FRACTION = 1e-4


class DiscreteChannel:
    """Row-stochastic transition matrix between input nodes and output cells.

    Attributes:
        u: Input powers, strictly increasing.
        y: Output grid in units of ``scale``.
        matrix: CSR matrix of shape (len(u), len(y)), each row summing to one.
        scale: Physical value of one output unit.
        row_entropy: Sum over j of W_ij log W_ij for every row.
    """

    def __init__(self, u, y, matrix, scale: float = 1.0):
        """Wrap an already normalized matrix."""
        self.u = np.asarray(u, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.matrix = sparse.csr_matrix(matrix)
        self.scale = scale
        entropy = self.matrix.copy()
        entropy.data = special.xlogy(entropy.data, entropy.data)
        self.row_entropy = np.asarray(entropy.sum(axis=1)).ravel()

    @classmethod
    def from_matrix(cls, matrix, cost=None) -> 'DiscreteChannel':
        """Build a channel from any nonnegative matrix, normalizing its rows.

        Args:
            matrix: Dense or sparse array with one row per input letter.
            cost: Optional input costs used as ``u``; defaults to 0, 1, 2, ...
        """
        matrix = sparse.csr_matrix(matrix, dtype=float)
        if matrix.nnz and matrix.data.min() < 0:
            raise ValueError('transition probabilities must be nonnegative')
        sums = np.asarray(matrix.sum(axis=1)).ravel()
        if np.any(sums <= 0):
            raise ValueError('every input letter needs an output')
        matrix = sparse.diags(1.0 / sums) @ matrix
        u = np.arange(matrix.shape[0], dtype=float) if cost is None else np.asarray(cost, float)
        return cls(u, np.arange(matrix.shape[1], dtype=float), matrix)

    @property
    def n_inputs(self) -> int:
        """Number of input letters."""
        return self.matrix.shape[0]

    @property
    def n_outputs(self) -> int:
        """Number of output cells."""
        return self.matrix.shape[1]

    def output_distribution(self, weights) -> np.ndarray:
        """Output probabilities induced by input weights."""
        return self.matrix.T @ np.asarray(weights, dtype=float)

    def divergences(self, output) -> np.ndarray:
        """Relative entropy D(W_i || p) in nats of every row against an output law."""
        log_output = np.log(np.maximum(output, np.finfo(float).tiny))
        return self.row_entropy - self.matrix @ log_output

    def mutual_information(self, weights) -> float:
        """Mutual information in nats between the inputs and the output cells."""
        weights = np.asarray(weights, dtype=float)
        d = self.divergences(self.output_distribution(weights))
        return max(0.0, float(weights @ d))


def input_nodes(c: ChannelConsts, mean: float, quad: QuadratureConfig) -> np.ndarray:
    """Input grid on [0, u_max_mult * mean].

    A geometric backbone resolves small powers; nodes spaced 1 / u_per_sigma apart in the
    stabilized coordinate resolve the rest.
    """
    if mean <= 0:
        raise ValueError('mean power must be positive')
    u_max = quad.u_max_mult * mean
    backbone = np.concatenate(
        ([0.0], np.geomspace(SMALLEST_FRACTION * mean, u_max, quad.u_nodes - 1))
    )
    probe = np.concatenate(([0.0], np.geomspace(SMALLEST_FRACTION**2 * mean, u_max, PROBE_NODES)))
    mu, var = transition_moments(probe, c)
    sigma_mid = np.sqrt(0.5 * (var[1:] + var[:-1]))
    t = np.concatenate(([0.0], np.cumsum(np.diff(mu) / sigma_mid)))
    step = 1.0 / quad.u_per_sigma
    budget = quad.max_nodes - backbone.size - 1
    if t[-1] / step > budget:
        logger.warning(
            f'{t[-1]:.3g} standard deviations of input range exceed max_nodes; '
            f'coarsening to {budget} stabilized nodes'
        )
        step = t[-1] / budget
    stabilized = np.interp(np.arange(int(t[-1] / step) + 1) * step, t, probe)
    return np.unique(np.concatenate((backbone, stabilized)))


def _ramp(starts: np.ndarray, steps: np.ndarray, counts: np.ndarray) -> np.ndarray:
    counts = counts.astype(np.int64)
    index = np.repeat(np.arange(starts.size), counts)
    offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    return starts[index] + steps[index] * offsets


def _resample(y: np.ndarray, size: int) -> np.ndarray:
    return np.interp(np.linspace(0.0, y.size - 1.0, size), np.arange(y.size), y)


def output_nodes(mu, sigma, quad: QuadratureConfig) -> np.ndarray:
    """Output grid resolving every row at y_per_sigma nodes per standard deviation.

    Between two row means whose windows overlap the grid is filled at the density required
    by the narrower row. Separated rows get local grids of +-span_sigmas each.
    """
    order = np.argsort(mu, kind='stable')
    m = np.asarray(mu, dtype=float)[order]
    sd = np.asarray(sigma, dtype=float)[order]
    per, span = quad.y_per_sigma, quad.span_sigmas
    tail = np.full(1, int(math.ceil(span * per)) + 1)
    pieces = [
        m,
        _ramp(m[:1], -sd[:1] / per, tail),
        _ramp(m[-1:], sd[-1:] / per, tail),
    ]
    if m.size > 1:
        gap = np.diff(m)
        narrow = np.minimum(sd[:-1], sd[1:])
        connected = gap <= span * (sd[:-1] + sd[1:])
        fill = np.where(connected, np.ceil(gap * per / narrow), 0.0)
        pieces.append(_ramp(m[:-1], gap / np.maximum(fill, 1.0), fill))
        apart = np.flatnonzero(~connected)
        counts = np.full(apart.size, tail[0])
        pieces.append(_ramp(m[apart], sd[apart] / per, counts))
        pieces.append(_ramp(m[apart + 1], -sd[apart + 1] / per, counts))
    y = np.unique(np.concatenate(pieces))
    if y.size < quad.y_nodes:
        y = _resample(y, quad.y_nodes)
    elif y.size > quad.max_nodes:
        logger.warning(f'output grid of {y.size} nodes coarsened to {quad.max_nodes}')
        y = _resample(y, quad.max_nodes)
    return y


def _cell_widths(y: np.ndarray) -> np.ndarray:
    if y.size == 1:
        return np.ones(1)
    width = np.empty_like(y)
    width[1:-1] = 0.5 * (y[2:] - y[:-2])
    width[0] = 0.5 * (y[1] - y[0])
    width[-1] = 0.5 * (y[-1] - y[-2])
    return width


def discretize(
    c: ChannelConsts,
    mean: Optional[float],
    quad: QuadratureConfig,
    exact: bool = False,
    nodes=None,
) -> DiscreteChannel:
    """Discretize the transition law into a banded row-stochastic matrix.

    Args:
        c: Channel constants.
        mean: Mean input power, used to place the default input nodes.
        quad: Grid controls.
        exact: Fill the rows from the exact density instead of the Gaussian one.
        nodes: Explicit strictly increasing input nodes, overriding ``mean``.

    Returns:
        The discretized channel.
    """
    if nodes is None:
        if mean is None:
            raise ValueError('either mean or nodes is required')
        u = input_nodes(c, mean, quad)
    else:
        u = np.asarray(nodes, dtype=float)
        if u.ndim != 1 or u.size == 0 or np.any(np.diff(u) <= 0) or u[0] < 0:
            raise ValueError('nodes must be nonnegative and strictly increasing')
    mu, var = transition_moments(u, c)
    scale = c.a2 if c.a2 > 0 else math.sqrt(float(var[0]))
    mu = mu / scale
    sd = np.sqrt(var) / scale
    y = output_nodes(mu, sd, quad)

    lo = np.searchsorted(y, mu - quad.span_sigmas * sd, side='left')
    hi = np.searchsorted(y, mu + quad.span_sigmas * sd, side='right')
    empty = hi <= lo
    if np.any(empty):
        nearest = np.clip(np.searchsorted(y, mu[empty]), 0, y.size - 1)
        left = np.clip(nearest - 1, 0, y.size - 1)
        closer = np.abs(y[left] - mu[empty]) < np.abs(y[nearest] - mu[empty])
        lo[empty] = np.where(closer, left, nearest)
        hi[empty] = lo[empty] + 1
    counts = hi - lo
    indptr = np.concatenate(([0], np.cumsum(counts)))
    rows = np.repeat(np.arange(u.size), counts)
    cols = np.arange(indptr[-1]) - indptr[rows] + lo[rows]
    width = _cell_widths(y)

    if exact:
        data = np.empty(indptr[-1])
        for i in range(u.size):
            a, b = indptr[i], indptr[i + 1]
            data[a:b] = transition_pdf_exact(y[cols[a:b]] * scale, u[i], c, quad)
        data *= width[cols]
    else:
        z = (y[cols] - mu[rows]) / sd[rows]
        data = np.exp(-0.5 * z**2) * width[cols] / sd[rows]
    sums = np.bincount(rows, weights=data, minlength=u.size)
    if np.any(sums <= 0):
        raise QuadratureError('a transition row carries no mass on the output grid', 0.0, 1.0)
    data /= sums[rows]
    matrix = sparse.csr_matrix((data, cols, indptr), shape=(u.size, y.size))
    logger.debug(
        f'discretized channel: {u.size} inputs, {y.size} outputs, {matrix.nnz} nonzeros'
    )
    return DiscreteChannel(u, y, matrix, scale)
