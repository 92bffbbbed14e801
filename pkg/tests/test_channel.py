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
"""Tests for the transition law and its oracles."""

import math
import numpy as np
import pytest
from awslabs.swipt_capacity.channel import (
    channel_consts,
    completed_square_moments,
    direct_moments,
    exact_moments,
    inner_moments,
    ks_distance_exact,
    ks_distance_to_gaussian,
    l1_density_distance,
    monte_carlo_samples,
    noiseless_pdf,
    outer_noncentrality,
    square_noncentrality,
    transition_gaussian,
    transition_moments,
    transition_pdf,
    transition_pdf_exact,
)
from awslabs.swipt_capacity.errors import QuadratureError
from awslabs.swipt_capacity.models import (
    ChannelConsts,
    DiodeOrder,
    Ncx2,
    QuadratureConfig,
    SystemParams,
)
from awslabs.swipt_capacity.phys import lna_input_power
from awslabs.swipt_capacity.stats import ncx2_pdf
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate


positive = st.floats(min_value=0.1, max_value=10.0)


class TestCompletedSquare:
    """Tests for the completed-square form of the transition moments."""

    def test_noncentrality_hand_value(self):
        """Test the noncentrality at a hand-evaluated point."""
        assert square_noncentrality(1.0, 2.0, 3.0, 4.0) == pytest.approx(169.0 / 64.0)

    @settings(max_examples=200, deadline=None)
    @given(a2=positive, a4=positive, mu_u=positive, sigma_u2=positive)
    def test_matches_direct_moments(self, a2, a4, mu_u, sigma_u2):
        """Test that completing the square reproduces the expanded moments."""
        mean_cs, var_cs = completed_square_moments(a2, a4, mu_u, sigma_u2)
        mean_d, var_d = direct_moments(a2, a4, mu_u, sigma_u2)
        assert float(mean_cs) == pytest.approx(float(mean_d), rel=1e-10)
        assert float(var_cs) == pytest.approx(float(var_d), rel=1e-10)

    def test_single_power_denominator_is_wrong(self):
        """Test that a denominator with a4 to the first power breaks the mean."""
        a2, a4, mu_u, sigma_u2 = 1.0, 2.0, 3.0, 4.0
        wrong = (2.0 * a4 * mu_u + a2) ** 2 / (4.0 * a4 * sigma_u2)
        wrong_mean = a4 * sigma_u2 * (1.0 + wrong) - a2**2 / (4.0 * a4)
        mean_d, _ = direct_moments(a2, a4, mu_u, sigma_u2)
        assert wrong_mean == pytest.approx(50.125)
        assert mean_d == pytest.approx(29.0)
        assert float(completed_square_moments(a2, a4, mu_u, sigma_u2)[0]) == pytest.approx(29.0)

    def test_needs_quartic_term(self):
        """Test that the completed square is undefined without a4."""
        with pytest.raises(ValueError):
            completed_square_moments(1.0, 0.0, 3.0, 4.0)
        c = ChannelConsts(a2=1.0, a4=0.0, p_rec=1.0, thermal_power=2.0)
        with pytest.raises(ValueError):
            outer_noncentrality(1.0, c)


class TestTransitionMoments:
    """Tests for the Gaussian transition law."""

    def test_inner_moments(self, small_consts):
        """Test the mean and variance of the normalized received power."""
        mean, var = inner_moments(20.0, small_consts)
        assert float(mean) == 22.0
        assert float(var) == 84.0

    def test_truncated_diode(self):
        """Test the second-order law at zero input."""
        c = ChannelConsts(a2=1.0, a4=0.0, p_rec=0.0, thermal_power=2.0)
        mu, var = transition_moments(0.0, c)
        assert float(mu) == pytest.approx(2.0)
        assert float(var) == pytest.approx(4.0)

    def test_forms_agree(self, small_consts):
        """Test that both closed forms give the same law."""
        u = np.array([0.0, 1.0, 30.0, 500.0])
        mu, var = transition_moments(u, small_consts)
        mean_cs, var_cs = completed_square_moments(
            small_consts.a2, small_consts.a4, *inner_moments(u, small_consts)
        )
        np.testing.assert_allclose(mu, mean_cs, rtol=1e-12)
        np.testing.assert_allclose(var, var_cs + small_consts.p_rec, rtol=1e-12)

    def test_increasing_in_input(self, small_consts):
        """Test that mean and variance grow with the input power."""
        mu, var = transition_moments(np.linspace(0.0, 1000.0, 101), small_consts)
        assert np.all(np.diff(mu) > 0)
        assert np.all(np.diff(var) > 0)

    def test_second_only_equals_zero_quartic(self):
        """Test that truncating the diode is the same as setting a4 to zero."""
        p = SystemParams()
        c2 = channel_consts(p, DiodeOrder.SECOND_ONLY)
        c4 = channel_consts(p, DiodeOrder.FOURTH)
        assert c2.a4 == 0.0
        assert c2.a2 == c4.a2
        assert c2.p_rec == c4.p_rec
        assert c4.a4 > 0

    def test_negative_input_rejected(self, small_consts):
        """Test that negative input powers are rejected."""
        with pytest.raises(ValueError):
            transition_moments(np.array([1.0, -1.0]), small_consts)

    def test_gaussian_record(self, small_consts):
        """Test the Gaussian record and its density."""
        g = transition_gaussian(20.0, small_consts)
        assert g.sigma == pytest.approx(math.sqrt(g.var))
        y = np.linspace(g.mu - 10 * g.sigma, g.mu + 10 * g.sigma, 2001)
        assert integrate.trapezoid(transition_pdf(y, 20.0, small_consts), y) == pytest.approx(1.0)

    def test_exact_moments_truncated(self):
        """Test that the exact and Gaussian moments coincide for a truncated diode."""
        c = ChannelConsts(a2=0.5, a4=0.0, p_rec=0.3, thermal_power=2.0)
        mean, var = exact_moments(7.0, c)
        mu, var_g = transition_moments(7.0, c)
        assert mean == pytest.approx(float(mu))
        assert var == pytest.approx(float(var_g))


class TestExactOracle:
    """Tests for the exact transition density."""

    def test_noiseless_truncated(self):
        """Test the change of variables when y is a scaled chi-squared variable."""
        c = ChannelConsts(a2=2.0, a4=0.0, p_rec=0.0, thermal_power=2.0)
        y = np.linspace(0.1, 60.0, 50)
        expected = ncx2_pdf(y / 2.0, Ncx2(k=2, s=5.0)) / 2.0
        np.testing.assert_allclose(transition_pdf_exact(y, 5.0, c, QuadratureConfig()), expected)

    def test_noiseless_negative_is_zero(self, small_consts):
        """Test that the noiseless law has no mass below zero."""
        assert np.all(noiseless_pdf(np.array([-3.0, -0.1]), 5.0, small_consts) == 0.0)

    def test_normalized_with_exact_mean(self, small_consts):
        """Test unit mass and the cumulant mean of the convolved density."""
        y = np.arange(-10.0, 1400.0 + 0.125, 0.25)
        pdf = transition_pdf_exact(y, 20.0, small_consts, QuadratureConfig())
        assert integrate.trapezoid(pdf, y) == pytest.approx(1.0, abs=1e-6)
        mean, _ = exact_moments(20.0, small_consts)
        assert integrate.trapezoid(y * pdf, y) == pytest.approx(mean, rel=1e-4)

    def test_ks_distance_decreasing(self, small_consts):
        """Test that the Gaussian law improves with the input power."""
        quad = QuadratureConfig()
        values = [ks_distance_exact(u, small_consts, quad) for u in (10.0, 100.0, 1000.0)]
        assert values[0] > values[1] > values[2]

    def test_l1_distance_decreasing(self, small_consts):
        """Test that the L1 distance falls with the input power."""
        quad = QuadratureConfig()
        assert l1_density_distance(1000.0, small_consts, quad) < l1_density_distance(
            10.0, small_consts, quad
        )

    def test_convolution_too_large(self):
        """Test that a grid over the node cap fails when the noise is not negligible."""
        c = ChannelConsts(a2=1.0, a4=0.05, p_rec=100.0, thermal_power=2.0)
        y = np.linspace(0.0, 5000.0, 11)
        with pytest.raises(QuadratureError) as excinfo:
            transition_pdf_exact(y, 100.0, c, QuadratureConfig(conv_nodes=1024))
        assert excinfo.value.achieved > excinfo.value.requested


class TestMonteCarlo:
    """Tests for the Monte-Carlo oracle."""

    def test_noiseless_limit(self):
        """Test that at very large input the samples concentrate at the Gaussian law."""
        c = ChannelConsts(a2=1.0, a4=1.0, p_rec=0.0, thermal_power=2.0)
        g = transition_gaussian(1e12, c)
        samples = monte_carlo_samples(1e12, c, 1000, seed=0)
        np.testing.assert_allclose(samples.mean(), g.mu, rtol=1e-4)
        np.testing.assert_allclose(samples.std(ddof=1), g.sigma, rtol=0.1)

    def test_reproducible(self, small_consts):
        """Test that a seed and shard count fix the samples."""
        a = monte_carlo_samples(10.0, small_consts, 1000, seed=3, shards=2)
        b = monte_carlo_samples(10.0, small_consts, 1000, seed=3, shards=2)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, monte_carlo_samples(10.0, small_consts, 1000, seed=4))

    def test_count_must_be_positive(self, small_consts):
        """Test that an empty draw is rejected."""
        with pytest.raises(ValueError):
            monte_carlo_samples(1.0, small_consts, 0, seed=0)

    def _check_reference_point(self, count):
        p = SystemParams()
        c = channel_consts(p)
        u = lna_input_power(p)
        samples = monte_carlo_samples(u, c, count, seed=2024, shards=4)
        mean, var = exact_moments(u, c)
        sd = samples.std(ddof=1)
        assert abs(samples.mean() - mean) <= 4.0 * sd / math.sqrt(count)
        centered = samples - samples.mean()
        se_var = math.sqrt((np.mean(centered**4) - sd**4) / count)
        assert abs(sd**2 - var) <= 4.0 * se_var
        assert ks_distance_to_gaussian(samples, transition_gaussian(u, c)) < 1e-2

    def test_reference_point(self):
        """Test moments and KS distance at the reference link with 10^6 samples."""
        self._check_reference_point(1_000_000)

    @pytest.mark.slow
    def test_reference_point_large(self):
        """Test moments and KS distance at the reference link with 10^7 samples."""
        self._check_reference_point(10_000_000)
