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
"""Transition law p(y_DC | u) of the integrated receiver.

The received sample is sqrt(u) plus circular complex Gaussian thermal noise of total power
G_LNA * P_th. In units of half that power its squared magnitude H is noncentral chi-squared with
two degrees of freedom and noncentrality s = 2u / (G_LNA * P_th). The rectifier output is
y_DC = a2 H + a4 H^2 + n_rec with n_rec ~ N(0, P_rec).
"""

import math
import numpy as np
from awslabs.swipt_capacity.errors import QuadratureError
from awslabs.swipt_capacity.models import (
    ChannelConsts,
    DiodeOrder,
    Ncx2,
    QuadratureConfig,
    SystemParams,
    TransitionGaussian,
)
from awslabs.swipt_capacity.phys import diode_coefficients, rec_noise_power, thermal_noise_power
from awslabs.swipt_capacity.stats import ncx2_pdf
from awslabs.swipt_capacity.util import shard_sizes, substream
from loguru import logger
from scipy import integrate, stats
from typing import Tuple


KERNEL_NODES_PER_SIGMA = 32
KERNEL_SPAN_SIGMAS = 12.0
_ROW_CHUNK = 256


def channel_consts(p: SystemParams, order: DiodeOrder = DiodeOrder.FOURTH) -> ChannelConsts:
    """Derive the channel constants from the physical parameters."""
    coeffs = diode_coefficients(p, order)
    thermal_power = p.lna_gain * thermal_noise_power(p)
    half = 0.5 * thermal_power
    return ChannelConsts(
        a2=coeffs.k2 * half,
        a4=coeffs.effective_k4 * half**2,
        p_rec=rec_noise_power(p),
        thermal_power=thermal_power,
    )


def inner_moments(u, c: ChannelConsts) -> Tuple[np.ndarray, np.ndarray]:
    """Mean 2 + s and variance 4 + 4 s of the normalized received power H."""
    s = c.s_of_u(np.asarray(u, dtype=float))
    return 2.0 + s, 4.0 + 4.0 * s


def square_noncentrality(a2, a4, mu_u, sigma_u2):
    """Noncentrality (2 a4 mu_u + a2)^2 / (4 a4^2 sigma_u^2) of the completed square."""
    return (2.0 * a4 * mu_u + a2) ** 2 / (4.0 * a4**2 * sigma_u2)


def completed_square_moments(a2, a4, mu_u, sigma_u2) -> Tuple[np.ndarray, np.ndarray]:
    """Moments of a2 H + a4 H^2 for Gaussian H by completing the square.

    With s_u = (2 a4 mu_u + a2)^2 / (4 a4^2 sigma_u^2) the quadratic is a scaled noncentral
    chi-squared variable with one degree of freedom, shifted by -a2^2 / (4 a4).

    Returns:
        Mean a4 sigma_u^2 (1 + s_u) - a2^2 / (4 a4) and variance
        2 (a4 sigma_u^2)^2 (1 + 2 s_u). Requires a4 > 0.
    """
    a4 = np.asarray(a4, dtype=float)
    if np.any(a4 <= 0):
        raise ValueError('completing the square needs a4 > 0')
    s_u = square_noncentrality(a2, a4, mu_u, sigma_u2)
    scale = a4 * sigma_u2
    return scale * (1.0 + s_u) - a2**2 / (4.0 * a4), 2.0 * scale**2 * (1.0 + 2.0 * s_u)


def direct_moments(a2, a4, mu_u, sigma_u2) -> Tuple[np.ndarray, np.ndarray]:
    """Moments of a2 H + a4 H^2 for Gaussian H, expanded term by term."""
    mean = a2 * mu_u + a4 * (mu_u**2 + sigma_u2)
    var = sigma_u2 * (a2 + 2.0 * a4 * mu_u) ** 2 + 2.0 * a4**2 * sigma_u2**2
    return mean, var


def outer_noncentrality(u, c: ChannelConsts) -> np.ndarray:
    """Noncentrality s_u of the completed square at input power u."""
    if c.a4 == 0:
        raise ValueError('the completed square is undefined for a truncated diode')
    return square_noncentrality(c.a2, c.a4, *inner_moments(u, c))


def transition_moments(u, c: ChannelConsts) -> Tuple[np.ndarray, np.ndarray]:
    """Mean and variance of the Gaussian transition law, vectorized over u.

    The expanded form is used because it is free of the cancellation between
    a4 sigma_u^2 (1 + s_u) and a2^2 / (4 a4) at small u; both forms agree algebraically.
    """
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise ValueError('input power must be nonnegative')
    mean, var = direct_moments(c.a2, c.a4, *inner_moments(u, c))
    return mean, var + c.p_rec


def transition_gaussian(u: float, c: ChannelConsts) -> TransitionGaussian:
    """Moment-matched Gaussian approximation of p(y_DC | u)."""
    mu, var = transition_moments(u, c)
    return TransitionGaussian(mu=float(mu), var=float(var))


def transition_pdf(y, u: float, c: ChannelConsts) -> np.ndarray:
    """Gaussian transition density evaluated at ``y``."""
    g = transition_gaussian(u, c)
    return stats.norm.pdf(np.asarray(y, dtype=float), g.mu, g.sigma)


def exact_moments(u: float, c: ChannelConsts) -> Tuple[float, float]:
    """Exact mean and variance of y_DC from the cumulants of H."""
    s = float(c.s_of_u(u))
    k1, k2, k3, k4 = 2.0 + s, 2.0 * (2.0 + 2.0 * s), 8.0 * (2.0 + 3.0 * s), 48.0 * (2.0 + 4.0 * s)
    mean = c.a2 * k1 + c.a4 * (k2 + k1**2)
    slope = c.a2 + 2.0 * c.a4 * k1
    var = slope**2 * k2 + 2.0 * c.a4 * slope * k3 + c.a4**2 * (k4 + 2.0 * k2**2)
    return mean, var + c.p_rec


def noiseless_pdf(z, u: float, c: ChannelConsts) -> np.ndarray:
    """Density of a2 H + a4 H^2 by the change of variables from H."""
    z = np.asarray(z, dtype=float)
    out = np.zeros_like(z)
    pos = z > 0
    zp = z[pos]
    h = 2.0 * zp / (c.a2 + np.sqrt(c.a2**2 + 4.0 * c.a4 * zp))
    out[pos] = ncx2_pdf(h, Ncx2(k=2, s=float(c.s_of_u(u)))) / (c.a2 + 2.0 * c.a4 * h)
    if c.a2 > 0:
        out[z == 0] = ncx2_pdf(0.0, Ncx2(k=2, s=float(c.s_of_u(u)))) / c.a2
    return out


def _convolve(y: np.ndarray, z: np.ndarray, f: np.ndarray, sigma_n: float) -> np.ndarray:
    out = np.empty_like(y)
    for start in range(0, y.size, _ROW_CHUNK):
        block = y[start : start + _ROW_CHUNK]
        kernel = stats.norm.pdf(block[:, None], z[None, :], sigma_n)
        out[start : start + _ROW_CHUNK] = integrate.trapezoid(kernel * f, z, axis=1)
    return out


def transition_pdf_exact(y, u: float, c: ChannelConsts, quad: QuadratureConfig) -> np.ndarray:
    """Exact transition density, the noiseless law convolved with the rectifier noise.

    The convolution uses a trapezoid rule at KERNEL_NODES_PER_SIGMA nodes per noise standard
    deviation and is checked against the rule on every other node.

    Raises:
        QuadratureError: If the two rules differ by more than ``quad.rel_tol`` of the peak.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if c.p_rec == 0:
        return noiseless_pdf(y, u, c)
    sigma_n = math.sqrt(c.p_rec)
    z_lo = max(0.0, float(y.min()) - KERNEL_SPAN_SIGMAS * sigma_n)
    z_hi = float(y.max()) + KERNEL_SPAN_SIGMAS * sigma_n
    if z_hi <= z_lo:
        return np.zeros_like(y)
    half = int(math.ceil((z_hi - z_lo) * KERNEL_NODES_PER_SIGMA / (2.0 * sigma_n)))
    if 2 * half + 1 > quad.conv_nodes:
        _, var_z = exact_moments(u, c)
        ratio = c.p_rec / max(var_z - c.p_rec, np.finfo(float).tiny)
        if ratio > quad.rel_tol:
            raise QuadratureError('convolution grid exceeds conv_nodes', ratio, quad.rel_tol)
        logger.debug(f'rectifier noise negligible at u={u:.3g} (variance ratio {ratio:.2g})')
        return noiseless_pdf(y, u, c)
    z = np.linspace(z_lo, z_hi, 2 * half + 1)
    f = noiseless_pdf(z, u, c)
    fine = _convolve(y, z, f, sigma_n)
    coarse = _convolve(y, z[::2], f[::2], sigma_n)
    achieved = float(np.max(np.abs(fine - coarse))) / 3.0
    requested = quad.rel_tol * max(float(np.max(fine)), np.finfo(float).tiny)
    if achieved > requested:
        raise QuadratureError('convolution did not converge', achieved, requested)
    return fine


def monte_carlo_samples(
    u: float, c: ChannelConsts, count: int, seed: int, shards: int = 1
) -> np.ndarray:
    """Simulate y_DC directly from the receiver model.

    Each shard draws from its own stream derived from (seed, shard index), so a run is
    reproducible for a fixed seed and shard count.
    """
    if count < 1:
        raise ValueError('count must be positive')
    root_s = math.sqrt(float(c.s_of_u(u)))
    sigma_n = math.sqrt(c.p_rec)
    parts = []
    for shard, n in enumerate(shard_sizes(count, shards)):
        rng = substream(seed, shard)
        h = (root_s + rng.standard_normal(n)) ** 2 + rng.standard_normal(n) ** 2
        parts.append(c.a2 * h + c.a4 * h**2 + sigma_n * rng.standard_normal(n))
    return np.concatenate(parts)


def ks_distance_to_gaussian(samples, g: TransitionGaussian) -> float:
    """Kolmogorov-Smirnov statistic of samples against the Gaussian transition law."""
    return float(stats.kstest(np.asarray(samples), stats.norm(g.mu, g.sigma).cdf).statistic)


def _oracle_window(u: float, c: ChannelConsts, quad: QuadratureConfig, points: int):
    g = transition_gaussian(u, c)
    y = np.linspace(g.mu - quad.span_sigmas * g.sigma, g.mu + quad.span_sigmas * g.sigma, points)
    return g, y, transition_pdf_exact(y, u, c, quad)


def l1_density_distance(
    u: float, c: ChannelConsts, quad: QuadratureConfig, points: int = 4001
) -> float:
    """L1 distance between the exact and the Gaussian transition densities.

    Mass of either law outside the +-span_sigmas window is counted in full.
    """
    g, y, exact = _oracle_window(u, c, quad, points)
    approx = stats.norm.pdf(y, g.mu, g.sigma)
    inside = integrate.trapezoid(np.abs(exact - approx), y)
    missing = max(0.0, 1.0 - integrate.trapezoid(exact, y))
    missing += max(0.0, 1.0 - integrate.trapezoid(approx, y))
    return float(inside + missing)


def ks_distance_exact(
    u: float, c: ChannelConsts, quad: QuadratureConfig, points: int = 4001
) -> float:
    """Largest CDF difference between the exact and the Gaussian transition laws."""
    g, y, exact = _oracle_window(u, c, quad, points)
    cdf_exact = integrate.cumulative_trapezoid(exact, y, initial=0.0)
    return float(np.max(np.abs(cdf_exact - stats.norm.cdf(y, g.mu, g.sigma))))
