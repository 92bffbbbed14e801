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
"""Data models for the SWIPT integrated-receiver capacity toolkit."""

import math
from enum import Enum
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import List, Optional


class DiodeOrder(str, Enum):
    """Truncation order of the diode Taylor expansion."""

    SECOND_ONLY = 'second-only'
    FOURTH = 'fourth'


class LawKind(str, Enum):
    """Family of a nonnegative input law."""

    GAMMA = 'gamma'
    RAYLEIGH = 'rayleigh'
    UNIFORM = 'uniform'
    DISCRETE = 'discrete'


class Method(str, Enum):
    """Capacity estimate produced by a sweep."""

    BLAHUT_ARIMOTO = 'ba'
    GAMMA = 'gamma'
    RAYLEIGH = 'rayleigh'
    UNIFORM = 'uniform'
    SECOND_ORDER = 'second-order'


class OutputFormat(str, Enum):
    """Serialization of result tables."""

    CSV = 'csv'
    JSON = 'json'


class SystemParams(BaseModel):
    """Physical parameters of the link and the integrated receiver, in linear units.

    The defaults reproduce the reference operating point at an LNA gain of 20 dB.
    """

    model_config = ConfigDict(frozen=True)

    transmit_power: float = Field(default=1.0, gt=0, description='Transmit power P_t in W')
    tx_gain: float = Field(default=100.0, gt=0, description='Transmit antenna gain (linear)')
    rx_gain: float = Field(default=10**0.3, gt=0, description='Receive antenna gain (linear)')
    wavelength: float = Field(default=0.1, gt=0, description='Carrier wavelength in m')
    distance: float = Field(default=10.0, gt=0, description='Link distance in m')
    saturation_current: float = Field(default=5e-6, gt=0, description='Diode i_s in A')
    ideality_factor: float = Field(default=1.05, gt=0, description='Diode ideality n')
    thermal_voltage: float = Field(default=0.02586, gt=0, description='Thermal voltage v_t in V')
    antenna_resistance: float = Field(default=50.0, gt=0, description='R_ant in ohm')
    bandwidth: float = Field(default=1e7, gt=0, description='Noise bandwidth B in Hz')
    temperature: float = Field(default=300.0, gt=0, description='Noise temperature T in K')
    rec_noise_ratio: float = Field(
        default=1000.0, ge=0, description='Rectifier noise power over thermal noise power'
    )
    lna_gain: float = Field(default=100.0, gt=0, description='LNA power gain G_LNA (linear)')


class DiodeCoeffs(BaseModel):
    """Taylor coefficients of the diode current, k2 in 1/V and k4 in 1/V^3."""

    model_config = ConfigDict(frozen=True)

    k2: float = Field(gt=0)
    k4: float = Field(gt=0)
    order: DiodeOrder = DiodeOrder.FOURTH

    @property
    def effective_k4(self) -> float:
        """Fourth-order coefficient as seen by the channel (zero when truncated)."""
        return 0.0 if self.order == DiodeOrder.SECOND_ONLY else self.k4


class Ncx2(BaseModel):
    """Noncentral chi-squared law with k degrees of freedom and noncentrality s."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=1)
    s: float = Field(ge=0)

    @property
    def mean(self) -> float:
        """Mean k + s."""
        return self.k + self.s

    @property
    def variance(self) -> float:
        """Variance 2 (k + 2 s)."""
        return 2.0 * (self.k + 2.0 * self.s)

    @property
    def stddev(self) -> float:
        """Standard deviation."""
        return math.sqrt(self.variance)

    @property
    def skewness(self) -> float:
        """Skewness, strictly decreasing in s."""
        return 2.0**1.5 * (self.k + 3.0 * self.s) / (self.k + 2.0 * self.s) ** 1.5


class InputLaw(BaseModel):
    """Probability law of the nonnegative transmitted power u.

    Continuous laws are described by their family and mean (plus the shape for the
    gamma family). Discrete laws carry explicit support points and weights; their
    mean is derived from them.
    """

    model_config = ConfigDict(frozen=True)

    kind: LawKind
    mean: float = Field(ge=0)
    alpha: Optional[float] = Field(default=None, gt=0)
    support: Optional[List[float]] = None
    weights: Optional[List[float]] = None

    @model_validator(mode='after')
    def _check_family(self) -> 'InputLaw':
        if self.kind == LawKind.DISCRETE:
            if self.support is None or self.weights is None:
                raise ValueError('discrete laws need support and weights')
            if len(self.support) != len(self.weights) or not self.support:
                raise ValueError('support and weights must be non-empty and of equal length')
            if min(self.support) < 0:
                raise ValueError('support points must be nonnegative')
            if min(self.weights) < 0:
                raise ValueError('weights must be nonnegative')
            if abs(math.fsum(self.weights) - 1.0) > 1e-12:
                raise ValueError('weights must sum to one')
            derived = math.fsum(u * w for u, w in zip(self.support, self.weights))
            if not math.isclose(derived, self.mean, rel_tol=1e-9, abs_tol=1e-300):
                raise ValueError(f'mean {self.mean} does not match the support ({derived})')
            return self
        if self.mean <= 0:
            raise ValueError('continuous laws need a positive mean')
        if self.kind == LawKind.GAMMA and self.alpha is None:
            raise ValueError('gamma laws need a shape alpha')
        if self.kind != LawKind.GAMMA and self.alpha is not None:
            raise ValueError(f'{self.kind.value} laws take no shape parameter')
        return self

    @classmethod
    def gamma(cls, alpha: float, mean: float) -> 'InputLaw':
        """Gamma law with shape alpha and the given mean."""
        return cls(kind=LawKind.GAMMA, mean=mean, alpha=alpha)

    @classmethod
    def rayleigh(cls, mean: float) -> 'InputLaw':
        """Rayleigh law with the given mean."""
        return cls(kind=LawKind.RAYLEIGH, mean=mean)

    @classmethod
    def uniform(cls, mean: float) -> 'InputLaw':
        """Uniform law on [0, 2 mean]."""
        return cls(kind=LawKind.UNIFORM, mean=mean)

    @classmethod
    def discrete(cls, support, weights) -> 'InputLaw':
        """Build a discrete law, renormalizing the weights exactly."""
        support = [float(u) for u in support]
        weights = [float(w) for w in weights]
        total = math.fsum(weights)
        if total <= 0:
            raise ValueError('weights must have a positive sum')
        weights = [w / total for w in weights]
        mean = math.fsum(u * w for u, w in zip(support, weights))
        return cls(kind=LawKind.DISCRETE, mean=mean, support=support, weights=weights)

    @classmethod
    def point_mass(cls, u0: float) -> 'InputLaw':
        """All mass at u0."""
        return cls.discrete([u0], [1.0])


class ChannelConsts(BaseModel):
    """Constants of the transition law p(y_DC | u) after LNA and diode.

    Attributes:
        a2: Second-order coefficient k2 * G_LNA * P_th / 2 (W per unit of noncentral power).
        a4: Fourth-order coefficient k4 * (G_LNA * P_th / 2)^2, zero for a truncated diode.
        p_rec: Rectifier noise power in W.
        thermal_power: Amplified thermal noise power G_LNA * P_th in W.
    """

    model_config = ConfigDict(frozen=True)

    a2: float = Field(ge=0)
    a4: float = Field(ge=0)
    p_rec: float = Field(ge=0)
    thermal_power: float = Field(gt=0)

    @model_validator(mode='after')
    def _check_nondegenerate(self) -> 'ChannelConsts':
        if self.a2 == 0 and self.a4 == 0 and self.p_rec == 0:
            raise ValueError('at least one of a2, a4 and p_rec must be positive')
        return self

    @property
    def order(self) -> DiodeOrder:
        """Diode order implied by a4."""
        return DiodeOrder.SECOND_ONLY if self.a4 == 0 else DiodeOrder.FOURTH

    def s_of_u(self, u):
        """Noncentrality 2u / (G_LNA * P_th) of the normalized received sample."""
        return 2.0 * u / self.thermal_power


class TransitionGaussian(BaseModel):
    """Moment-matched Gaussian approximation of p(y_DC | u)."""

    model_config = ConfigDict(frozen=True)

    mu: float
    var: float = Field(gt=0)

    @property
    def sigma(self) -> float:
        """Standard deviation."""
        return math.sqrt(self.var)


class QuadratureConfig(BaseModel):
    """Discretization controls for the (u, y) grids."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    u_nodes: int = Field(default=64, ge=64, description='Geometric backbone nodes on u')
    y_nodes: int = Field(default=256, ge=64, description='Minimum number of y nodes')
    u_max_mult: float = Field(default=30.0, gt=1, description='Largest u over the mean')
    rel_tol: float = Field(default=1e-4, gt=0, le=1e-3)
    u_per_sigma: float = Field(
        default=1.0, gt=0, description='Input nodes per conditional standard deviation'
    )
    y_per_sigma: float = Field(
        default=2.0, gt=0, description='Output nodes per conditional standard deviation'
    )
    span_sigmas: float = Field(default=10.0, ge=6, description='Half-width of each row')
    max_nodes: int = Field(default=2_000_000, ge=1000)
    conv_nodes: int = Field(default=65536, ge=1024, description='Cap of the convolution grid')

    def refined(self) -> 'QuadratureConfig':
        """Return a configuration with doubled node counts and densities."""
        return self.model_copy(
            update={
                'u_nodes': 2 * self.u_nodes,
                'y_nodes': 2 * self.y_nodes,
                'u_per_sigma': 2 * self.u_per_sigma,
                'y_per_sigma': 2 * self.y_per_sigma,
                'max_nodes': 2 * self.max_nodes,
                'conv_nodes': 2 * self.conv_nodes,
            }
        )


class CapacityResult(BaseModel):
    """Outcome of a lower-bound evaluation or a capacity solve."""

    model_config = ConfigDict(frozen=True)

    method: Method
    bits: float = Field(ge=0)
    law: InputLaw
    iterations: int = Field(ge=0)
    converged: bool
    constraint_gap: float = Field(ge=0)
    upper_gap_bits: Optional[float] = Field(
        default=None, description='Duality gap of the Blahut-Arimoto bounds in bits'
    )
    multiplier: Optional[float] = Field(
        default=None, description='Lagrange multiplier of the mean-power constraint, nats/W'
    )

    @model_validator(mode='after')
    def _check_gap(self) -> 'CapacityResult':
        if self.converged and self.constraint_gap > 1e-3:
            raise ValueError('a converged result must meet the power constraint within 1e-3')
        return self


class SweepRow(BaseModel):
    """One row of the capacity sweep table."""

    model_config = ConfigDict(frozen=True)

    g_lna_db: float
    method: Method
    bits: float
    alpha_opt: Optional[float] = None
    converged: bool
    constraint_gap: float


class SystemConfig(BaseModel):
    """Link parameters as written in configuration files (gains in dB)."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    transmit_power_w: float = Field(default=1.0, gt=0)
    tx_gain_dbi: float = 20.0
    rx_gain_dbi: float = 3.0
    wavelength_m: float = Field(default=0.1, gt=0)
    distance_m: float = Field(default=10.0, gt=0)
    saturation_current_a: float = Field(default=5e-6, gt=0)
    ideality_factor: float = Field(default=1.05, gt=0)
    thermal_voltage_v: float = Field(default=0.02586, gt=0)
    antenna_resistance_ohm: float = Field(default=50.0, gt=0)
    bandwidth_hz: float = Field(default=1e7, gt=0)
    temperature_k: float = Field(default=300.0, gt=0)
    rec_noise_ratio_db: float = 30.0

    def to_params(self, lna_gain_db: float) -> SystemParams:
        """Convert to linear-unit parameters at the given LNA gain."""
        return SystemParams(
            transmit_power=self.transmit_power_w,
            tx_gain=10 ** (self.tx_gain_dbi / 10),
            rx_gain=10 ** (self.rx_gain_dbi / 10),
            wavelength=self.wavelength_m,
            distance=self.distance_m,
            saturation_current=self.saturation_current_a,
            ideality_factor=self.ideality_factor,
            thermal_voltage=self.thermal_voltage_v,
            antenna_resistance=self.antenna_resistance_ohm,
            bandwidth=self.bandwidth_hz,
            temperature=self.temperature_k,
            rec_noise_ratio=10 ** (self.rec_noise_ratio_db / 10),
            lna_gain=10 ** (lna_gain_db / 10),
        )


class SweepConfig(BaseModel):
    """LNA gains to sweep, either a regular dB range or an explicit list."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    start_db: float = 0.0
    stop_db: float = 40.0
    step_db: float = Field(default=2.0, gt=0)
    points_db: Optional[List[float]] = None

    @model_validator(mode='after')
    def _check_range(self) -> 'SweepConfig':
        if self.points_db is not None and not self.points_db:
            raise ValueError('points_db must not be empty')
        if self.points_db is None and self.stop_db < self.start_db:
            raise ValueError('stop_db must not be below start_db')
        return self

    def values(self) -> List[float]:
        """LNA gains in dB, in sweep order."""
        if self.points_db is not None:
            return list(self.points_db)
        count = int(math.floor((self.stop_db - self.start_db) / self.step_db + 1e-9)) + 1
        return [self.start_db + i * self.step_db for i in range(count)]


class SolverConfig(BaseModel):
    """Stopping rule of the Blahut-Arimoto iteration."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    tol: float = Field(default=1e-3, gt=0, description='Bound gap in bits')
    max_iter: int = Field(default=5000, ge=1)


class Lemma1Config(BaseModel):
    """Noncentrality values at which the normal approximation is scored."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    k: int = 2
    s_list: List[float] = Field(
        default_factory=lambda: [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0]
    )

    @field_validator('k')
    @classmethod
    def _check_k(cls, k: int) -> int:
        if k not in (1, 2):
            raise ValueError('k must be 1 or 2')
        return k

    @field_validator('s_list')
    @classmethod
    def _check_s(cls, s_list: List[float]) -> List[float]:
        if not s_list or min(s_list) < 0:
            raise ValueError('s_list must be non-empty and nonnegative')
        return s_list


class ValidationConfig(BaseModel):
    """Oracle checks of the Gaussian transition model."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    g_lna_db: float = 20.0
    u_mults: List[float] = Field(default_factory=lambda: [0.1, 1.0, 10.0, 100.0])
    mc_count: int = Field(default=1_000_000, ge=100_000)
    shards: int = Field(default=4, ge=1)
    ks_threshold: float = Field(default=1e-2, gt=0)
    l1_threshold: float = Field(default=1e-2, gt=0)
    moment_sigmas: float = Field(default=4.0, gt=0)

    @field_validator('u_mults')
    @classmethod
    def _check_mults(cls, u_mults: List[float]) -> List[float]:
        if not u_mults or min(u_mults) < 0:
            raise ValueError('u_mults must be non-empty and nonnegative')
        return u_mults


class ExperimentConfig(BaseModel):
    """Everything a sweep, a normal-approximation curve or a validation run needs."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    system: SystemConfig = Field(default_factory=SystemConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    methods: List[Method] = Field(
        default_factory=lambda: [
            Method.BLAHUT_ARIMOTO,
            Method.GAMMA,
            Method.RAYLEIGH,
            Method.UNIFORM,
            Method.SECOND_ORDER,
        ]
    )
    quadrature: QuadratureConfig = Field(default_factory=QuadratureConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    lemma1: Lemma1Config = Field(default_factory=Lemma1Config)
    validation: ValidationConfig = Field(default_factory=ValidationConfig)
    seed: int = Field(default=0, ge=0, lt=2**64)
    output_path: Optional[str] = None
    format: OutputFormat = OutputFormat.CSV
    workers: int = Field(default=1, ge=1)
    exact_oracle: bool = False

    @field_validator('methods')
    @classmethod
    def _check_methods(cls, methods: List[Method]) -> List[Method]:
        if not methods:
            raise ValueError('at least one method is required')
        if len(set(methods)) != len(methods):
            raise ValueError('methods must not repeat')
        return methods
