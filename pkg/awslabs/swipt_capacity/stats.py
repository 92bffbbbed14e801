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
"""Noncentral chi-squared law, its normal approximation and the input laws."""

import math
import numpy as np
import warnings
from awslabs.swipt_capacity.errors import QuadratureError
from awslabs.swipt_capacity.models import InputLaw, LawKind, Ncx2
from loguru import logger
from scipy import integrate, special, stats
from typing import NamedTuple, Tuple


SERIES_CUTOFF = 1e-18
# Half-width of the Poisson index window, in standard deviations of the mixing law.
SERIES_WINDOW_SDS = 12.0
# Largest (points x terms) block evaluated at once.
_BLOCK_CELLS = 1 << 21


class L2Distance(NamedTuple):
    """Squared L2 distance between two CDFs and the quadrature error estimate."""

    value: float
    abs_error: float


def _nonnegative(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise ValueError('noncentral chi-squared variates are nonnegative')
    return x


def ncx2_logpdf(x, dist: Ncx2) -> np.ndarray:
    """Log density of the noncentral chi-squared law.

    Uses the exponentially scaled Bessel function so that the result stays finite for
    large noncentralities.

    Args:
        x: Nonnegative evaluation points.
        dist: The law.

    Returns:
        Log density with the shape of ``x``.
    """
    x = _nonnegative(x)
    k, s = dist.k, dist.s
    if s == 0:
        return stats.chi2.logpdf(x, k)
    nu = 0.5 * k - 1.0
    out = np.empty_like(x)
    pos = x > 0
    xp = x[pos]
    out[pos] = (
        math.log(0.5)
        - 0.5 * (np.sqrt(xp) - math.sqrt(s)) ** 2
        + 0.5 * nu * np.log(xp / s)
        + np.log(special.ive(nu, np.sqrt(s * xp)))
    )
    # At the origin only the j = 0 term of the Poisson mixture survives.
    out[~pos] = stats.chi2.logpdf(0.0, k) - 0.5 * s
    return out


def ncx2_pdf(x, dist: Ncx2) -> np.ndarray:
    """Density of the noncentral chi-squared law, zero mass below the origin."""
    return np.exp(ncx2_logpdf(x, dist))


def ncx2_cdf(x, dist: Ncx2) -> np.ndarray:
    """Distribution function as a Poisson mixture of central chi-squared laws.

    Only mixture indices within ``SERIES_WINDOW_SDS`` Poisson standard deviations of s / 2
    are summed, and of those only terms with a weight above ``SERIES_CUTOFF`` times the
    largest one, so the cost grows like sqrt(s).
    """
    x = _nonnegative(x)
    k, s = dist.k, dist.s
    if s == 0:
        return stats.chi2.cdf(x, k)
    lam = 0.5 * s
    half = SERIES_WINDOW_SDS * math.sqrt(lam) + 40.0
    j = np.arange(max(0, int(math.floor(lam - half))), int(math.ceil(lam + half)) + 1)
    log_weights = stats.poisson.logpmf(j, lam)
    keep = log_weights >= log_weights.max() + math.log(SERIES_CUTOFF)
    j, weights = j[keep], np.exp(log_weights[keep])
    flat = x.ravel()
    out = np.empty_like(flat)
    rows = max(1, _BLOCK_CELLS // j.size)
    for start in range(0, flat.size, rows):
        block = flat[start : start + rows]
        out[start : start + rows] = special.gammainc(0.5 * k + j, 0.5 * block[:, None]) @ weights
    return np.clip(out.reshape(x.shape), 0.0, 1.0)


def lemma1_normal(dist: Ncx2) -> Tuple[float, float]:
    """Mean and variance (k + s, 2 (k + 2 s)) of the approximating normal law."""
    return dist.mean, dist.variance


def ncx2_skewness(dist: Ncx2) -> float:
    """Skewness 2^(3/2) (k + 3 s) / (k + 2 s)^(3/2), strictly decreasing in s."""
    return dist.skewness


def cdf_l2_distance(dist: Ncx2, tol: float = 1e-9) -> L2Distance:
    """Integrated squared difference between the exact CDF and its normal approximation.

    The integral runs over [0, mean + 12 sd] of the approximating normal.

    Args:
        dist: The noncentral chi-squared law.
        tol: Largest acceptable absolute quadrature error.

    Returns:
        The distance and the quadrature error estimate.

    Raises:
        QuadratureError: If the error estimate exceeds ``tol``.
    """
    mean, var = lemma1_normal(dist)
    sd = math.sqrt(var)
    upper = mean + 12.0 * sd

    def integrand(x: float) -> float:
        return (float(ncx2_cdf(x, dist)) - stats.norm.cdf(x, mean, sd)) ** 2

    with warnings.catch_warnings():
        warnings.simplefilter('ignore', integrate.IntegrationWarning)
        value, abs_error = integrate.quad(
            integrand, 0.0, upper, points=[mean], limit=500, epsabs=1e-12, epsrel=1e-10
        )[:2]
    logger.debug(f'L2 distance for k={dist.k}, s={dist.s}: {value:.6g} +- {abs_error:.2g}')
    if abs_error > tol:
        raise QuadratureError(f'L2 distance at s={dist.s} did not converge', abs_error, tol)
    return L2Distance(value=value, abs_error=abs_error)


def _frozen(law: InputLaw):
    if law.kind == LawKind.GAMMA:
        return stats.gamma(a=law.alpha, scale=law.mean / law.alpha)
    if law.kind == LawKind.RAYLEIGH:
        return stats.rayleigh(scale=law.mean * math.sqrt(2.0 / math.pi))
    if law.kind == LawKind.UNIFORM:
        return stats.uniform(loc=0.0, scale=2.0 * law.mean)
    raise ValueError(f'{law.kind.value} laws have no continuous distribution')


def input_pdf(u, law: InputLaw) -> np.ndarray:
    """Density of a continuous input law.

    Raises:
        ValueError: If any ``u`` is negative or NaN.
    """
    u = np.asarray(u, dtype=float)
    if np.any(u < 0) or np.any(np.isnan(u)):
        raise ValueError('input powers are nonnegative')
    return _frozen(law).pdf(u)


def input_cdf(u, law: InputLaw) -> np.ndarray:
    """Distribution function of an input law."""
    u = np.asarray(u, dtype=float)
    if law.kind != LawKind.DISCRETE:
        return _frozen(law).cdf(u)
    support = np.asarray(law.support)
    weights = np.asarray(law.weights)
    return (support[None, :] <= u.reshape(-1, 1)).astype(float).dot(weights).reshape(u.shape)


def input_mean(law: InputLaw) -> float:
    """Mean of an input law, by quadrature for continuous families."""
    if law.kind == LawKind.DISCRETE:
        return math.fsum(u * w for u, w in zip(law.support, law.weights))
    return float(_frozen(law).expect())


def input_sample(law: InputLaw, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` reproducible samples from an input law."""
    if n < 1:
        raise ValueError(f'sample count must be positive, got {n}')
    rng = np.random.default_rng(seed)
    if law.kind == LawKind.DISCRETE:
        return rng.choice(np.asarray(law.support), size=n, p=np.asarray(law.weights))
    return _frozen(law).rvs(size=n, random_state=rng)


def _partial_mean(law: InputLaw, x: np.ndarray) -> np.ndarray:
    """E[u; u <= x] for a continuous input law."""
    if law.kind == LawKind.GAMMA:
        return law.mean * stats.gamma.cdf(x, law.alpha + 1.0, scale=law.mean / law.alpha)
    if law.kind == LawKind.RAYLEIGH:
        sigma = law.mean * math.sqrt(2.0 / math.pi)
        return law.mean * special.erf(x / (sigma * math.sqrt(2.0))) - x * np.exp(
            -0.5 * (x / sigma) ** 2
        )
    clipped = np.clip(x, 0.0, 2.0 * law.mean)
    return clipped**2 / (4.0 * law.mean)


def discretize_law(law: InputLaw, nodes) -> np.ndarray:
    """Probability of each node when the law is lumped onto a strictly increasing grid.

    Continuous laws split the mass of every interval between its two end nodes so that both
    the mass and the mean inside the grid are kept; mass beyond the last node goes to it.
    Discrete laws move each support point to its nearest node.
    """
    nodes = np.asarray(nodes, dtype=float)
    if nodes.ndim != 1 or nodes.size == 0 or np.any(np.diff(nodes) <= 0):
        raise ValueError('nodes must be a non-empty strictly increasing vector')
    if law.kind == LawKind.DISCRETE:
        support = np.asarray(law.support)
        right = np.clip(np.searchsorted(nodes, support), 0, nodes.size - 1)
        left = np.clip(right - 1, 0, nodes.size - 1)
        nearest = np.where(
            np.abs(nodes[left] - support) <= np.abs(nodes[right] - support), left, right
        )
        return np.bincount(nearest, weights=np.asarray(law.weights), minlength=nodes.size)
    frozen = _frozen(law)
    mass = np.zeros(nodes.size)
    mass[0] = frozen.cdf(nodes[0])
    mass[-1] = frozen.sf(nodes[-1])
    if nodes.size > 1:
        m0 = np.diff(frozen.cdf(nodes))
        m1 = np.diff(_partial_mean(law, nodes))
        width = np.diff(nodes)
        mass[1:] += (m1 - nodes[:-1] * m0) / width
        mass[:-1] += (nodes[1:] * m0 - m1) / width
    mass = np.clip(mass, 0.0, None)
    return mass / mass.sum()
