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
"""Tests for mutual information, the lower bounds and Blahut-Arimoto."""

import math
import numpy as np
import pytest
from awslabs.swipt_capacity.channel import channel_consts, transition_pdf
from awslabs.swipt_capacity.discretize import DiscreteChannel, discretize
from awslabs.swipt_capacity.errors import MonotonicityError
from awslabs.swipt_capacity.infotheory import (
    blahut_arimoto,
    blahut_arimoto_matrix,
    lower_bound,
    marginal_pdf,
    mutual_information,
    mutual_information_discrete,
    optimize_gamma_shape,
)
from awslabs.swipt_capacity.models import (
    ChannelConsts,
    InputLaw,
    LawKind,
    Method,
    QuadratureConfig,
    SystemConfig,
    SystemParams,
)
from awslabs.swipt_capacity.phys import lna_input_power
from awslabs.swipt_capacity.stats import discretize_law
from scipy import integrate, optimize


MEAN = 10.0


def binary_entropy(p: float) -> float:
    """Binary entropy in bits."""
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


@pytest.fixture
def quad():
    """Default grid controls."""
    return QuadratureConfig()


@pytest.fixture
def channel(small_consts, quad):
    """Discretized small channel shared by the bound comparisons."""
    return discretize(small_consts, MEAN, quad)


class TestMutualInformation:
    """Tests for mutual information of input laws."""

    def test_point_mass_carries_nothing(self, small_consts, quad):
        """Test that a deterministic input gives zero information."""
        law = InputLaw.point_mass(MEAN)
        assert mutual_information(law, small_consts, quad) == pytest.approx(0.0, abs=1e-12)

    def test_input_independent_channel(self, quad):
        """Test that a channel ignoring its input carries nothing."""
        c = ChannelConsts(a2=0.0, a4=0.0, p_rec=1.0, thermal_power=2.0)
        assert mutual_information(InputLaw.gamma(1.0, MEAN), c, quad) == pytest.approx(
            0.0, abs=1e-9
        )

    def test_separated_two_point_law(self, quad):
        """Test one bit for two equiprobable, well separated inputs."""
        c = ChannelConsts(a2=1.0, a4=0.0, p_rec=0.01, thermal_power=2.0)
        law = InputLaw.discrete([0.0, 1e4], [0.5, 0.5])
        assert mutual_information(law, c, quad) == pytest.approx(1.0, abs=1e-6)

    def test_positive_and_reusable(self, small_consts, quad, channel):
        """Test that a shared discretization gives the same value."""
        law = InputLaw.gamma(2.0, MEAN)
        bits = mutual_information(law, small_consts, quad, channel=channel)
        assert bits > 0
        assert bits == pytest.approx(mutual_information(law, small_consts, quad))
        weights = discretize_law(law, channel.u)
        assert mutual_information_discrete(weights, channel) == pytest.approx(bits)


class TestMarginal:
    """Tests for the output density."""

    def test_integrates_to_one(self, small_consts, quad):
        """Test that the marginal density has unit mass."""
        y = np.linspace(-50.0, 20000.0, 40001)
        pdf = marginal_pdf(y, InputLaw.gamma(2.0, MEAN), small_consts, quad)
        assert np.all(pdf >= 0)
        assert integrate.trapezoid(pdf, y) == pytest.approx(1.0, abs=1e-3)

    def test_point_mass_is_transition(self, small_consts, quad):
        """Test that a point mass reproduces the transition density."""
        y = np.linspace(0.0, 200.0, 101)
        np.testing.assert_allclose(
            marginal_pdf(y, InputLaw.point_mass(MEAN), small_consts, quad),
            transition_pdf(y, MEAN, small_consts),
            rtol=1e-12,
        )


class TestLowerBounds:
    """Tests for the fixed-family lower bounds."""

    def test_gamma_beats_exponential(self, small_consts, quad, channel):
        """Test that the optimized shape is no worse than alpha = 1."""
        best = optimize_gamma_shape(small_consts, MEAN, quad, channel)
        exponential = mutual_information(
            InputLaw.gamma(1.0, MEAN), small_consts, quad, channel=channel
        )
        assert best.method == Method.GAMMA
        assert best.law.kind == LawKind.GAMMA
        assert best.bits >= exponential
        assert 0.05 <= best.law.alpha <= 50.0

    @pytest.mark.parametrize('kind', [Method.RAYLEIGH, Method.UNIFORM])
    def test_fixed_families(self, kind, small_consts, quad, channel):
        """Test that the fixed laws keep the mean budget."""
        result = lower_bound(kind, small_consts, MEAN, quad, channel)
        assert result.method == kind
        assert result.bits > 0
        assert result.law.mean == MEAN
        assert result.constraint_gap <= 1e-3

    def test_rejects_other_methods(self, small_consts, quad):
        """Test that only fixed families are lower bounds."""
        with pytest.raises(ValueError):
            lower_bound(Method.BLAHUT_ARIMOTO, small_consts, MEAN, quad)


class TestBlahutArimotoMatrix:
    """Tests for Blahut-Arimoto on hand-built channels."""

    def test_noiseless_binary(self):
        """Test one bit for the perfect binary channel."""
        solution = blahut_arimoto_matrix(np.eye(2))
        assert solution.bits == pytest.approx(1.0, abs=1e-6)
        assert solution.converged

    def test_binary_symmetric(self):
        """Test the binary symmetric channel with crossover 0.11."""
        p = 0.11
        solution = blahut_arimoto_matrix(np.array([[1 - p, p], [p, 1 - p]]))
        assert solution.bits == pytest.approx(1.0 - binary_entropy(p), abs=1e-4)
        np.testing.assert_allclose(solution.weights, [0.5, 0.5], atol=1e-6)

    def test_z_channel(self):
        """Test the Z channel and the monotone lower bound."""
        solution = blahut_arimoto_matrix(np.array([[1.0, 0.0], [0.5, 0.5]]))
        assert solution.bits == pytest.approx(math.log2(1.25), abs=1e-5)
        assert all(b >= a for a, b in zip(solution.history, solution.history[1:]))

    def test_cost_constrained_identity(self):
        """Test the Gibbs law on a noiseless ternary channel with costs 0, 1, 2."""
        cost = np.array([0.0, 1.0, 2.0])
        solution = blahut_arimoto_matrix(np.eye(3), cost, target=0.5)

        def gibbs_mean(beta: float) -> float:
            w = np.exp(-beta * cost)
            return float(w @ cost / w.sum())

        beta = optimize.brentq(lambda b: gibbs_mean(b) - 0.5, 0.0, 10.0)
        w = np.exp(-beta * cost)
        w /= w.sum()
        entropy = -float(w @ np.log2(w))
        assert solution.converged
        assert solution.mean_cost == pytest.approx(0.5, rel=1e-3)
        assert solution.bits == pytest.approx(entropy, abs=1e-3)
        assert solution.multiplier == pytest.approx(beta, rel=1e-2)

    def test_slack_budget(self):
        """Test that a budget above the unconstrained optimum leaves the multiplier at zero."""
        solution = blahut_arimoto_matrix(np.eye(3), [0.0, 1.0, 2.0], target=5.0)
        assert solution.multiplier == 0.0
        assert solution.constraint_gap == 0.0
        assert solution.bits == pytest.approx(math.log2(3.0), abs=1e-5)

    def test_budget_below_cheapest_letter(self):
        """Test that an infeasible budget is rejected."""
        with pytest.raises(ValueError):
            blahut_arimoto_matrix(np.eye(2), [1.0, 2.0], target=0.5)

    def test_bad_initial(self):
        """Test that the starting law must match the inputs."""
        with pytest.raises(ValueError):
            blahut_arimoto_matrix(np.eye(2), initial=[1.0, 0.0, 0.0])

    def test_monotonicity_guard(self, mocker):
        """Test that a falling lower bound is reported."""
        ch = DiscreteChannel.from_matrix(np.array([[0.9, 0.1], [0.2, 0.8]]))
        values = iter([np.array([1.0, 0.0]), np.array([0.0, 0.0])])
        mocker.patch.object(ch, 'divergences', side_effect=lambda output: next(values))
        with pytest.raises(MonotonicityError):
            blahut_arimoto_matrix(ch, tol=1e-12)


class TestBlahutArimoto:
    """Tests for Blahut-Arimoto on the receiver channel."""

    def test_capacity_exceeds_lower_bounds(self, small_consts, quad, channel):
        """Test that the optimized law beats every fixed family and meets the budget."""
        gamma = lower_bound(Method.GAMMA, small_consts, MEAN, quad, channel)
        result = blahut_arimoto(small_consts, MEAN, quad, channel=channel, initial=gamma.law)
        assert result.method == Method.BLAHUT_ARIMOTO
        assert result.law.kind == LawKind.DISCRETE
        assert result.converged
        assert result.constraint_gap <= 1e-3
        assert result.law.mean == pytest.approx(MEAN, rel=1e-3)
        assert result.upper_gap_bits < 1e-3
        assert result.bits >= gamma.bits - 2e-2
        for kind in (Method.RAYLEIGH, Method.UNIFORM):
            assert result.bits >= lower_bound(kind, small_consts, MEAN, quad, channel).bits - 2e-2

    def test_label(self, small_consts, quad, channel):
        """Test that the result carries the requested method label."""
        result = blahut_arimoto(
            small_consts, MEAN, quad, channel=channel, method=Method.SECOND_ORDER
        )
        assert result.method == Method.SECOND_ORDER

    @pytest.mark.slow
    def test_reference_point(self):
        """Test the full-size problem at the reference link."""
        p = SystemParams()
        c = channel_consts(p)
        mean = lna_input_power(p)
        quad = QuadratureConfig()
        ch = discretize(c, mean, quad)
        gamma = lower_bound(Method.GAMMA, c, mean, quad, ch)
        result = blahut_arimoto(c, mean, quad, channel=ch, initial=gamma.law)
        assert result.converged
        assert result.bits >= gamma.bits - 2e-2


def reference_point(g_lna_db: float):
    """Channel constants and mean input power of the default link at one LNA gain."""
    p = SystemConfig().to_params(g_lna_db)
    return channel_consts(p), lna_input_power(p)


class TestExactRows:
    """Tests comparing the Gaussian and the exact transition rows."""

    def test_small_channel_information_agrees(self, small_consts, quad):
        """Test that exact rows change the information by less than 0.05 bits."""
        nodes = np.linspace(400.0, 2000.0, 33)
        weights = np.full(nodes.size, 1.0 / nodes.size)
        gaussian = mutual_information_discrete(
            weights, discretize(small_consts, None, quad, nodes=nodes)
        )
        exact = mutual_information_discrete(
            weights, discretize(small_consts, None, quad, exact=True, nodes=nodes)
        )
        assert gaussian > 1.0
        assert abs(exact - gaussian) < 0.05

    @pytest.mark.slow
    @pytest.mark.parametrize('g_lna_db', [0.0, 20.0])
    def test_reference_information_agrees(self, g_lna_db, quad):
        """Test the same agreement for the exponential law at the default link."""
        c, mean = reference_point(g_lna_db)
        gaussian = discretize(c, mean, quad)
        exact = discretize(c, mean, quad, exact=True)
        weights = discretize_law(InputLaw.gamma(1.0, mean), gaussian.u)
        bits = mutual_information_discrete(weights, gaussian)
        assert abs(mutual_information_discrete(weights, exact) - bits) < 0.05


class TestGridRefinement:
    """Tests that capacities are stable under grid refinement."""

    @pytest.mark.slow
    @pytest.mark.parametrize('g_lna_db', [0.0, 10.0])
    def test_doubling_nodes(self, g_lna_db, quad):
        """Test that doubling every node count moves each capacity by under 0.01 bits."""
        c, mean = reference_point(g_lna_db)
        values = []
        for q in (quad, quad.refined()):
            ch = discretize(c, mean, q)
            gamma = lower_bound(Method.GAMMA, c, mean, q, ch)
            ba = blahut_arimoto(c, mean, q, channel=ch, initial=gamma.law)
            uniform = lower_bound(Method.UNIFORM, c, mean, q, ch)
            values.append((gamma.bits, ba.bits, uniform.bits))
        coarse, fine = values
        np.testing.assert_allclose(fine, coarse, atol=1e-2)
