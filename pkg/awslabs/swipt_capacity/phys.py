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
"""Link budget, noise powers and diode Taylor coefficients."""

import math
from awslabs.swipt_capacity.models import DiodeCoeffs, DiodeOrder, SystemParams
from scipy.constants import Boltzmann


def db_to_linear(x_db: float) -> float:
    """Convert a power ratio from dB to linear."""
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    """Convert a positive power ratio from linear to dB."""
    if x <= 0:
        raise ValueError(f'cannot express {x} in dB')
    return 10.0 * math.log10(x)


def path_loss(p: SystemParams) -> float:
    """Free-space path gain (lambda / (4 pi d))^2."""
    return (p.wavelength / (4.0 * math.pi * p.distance)) ** 2


def received_power(p: SystemParams) -> float:
    """Average received RF power P_rec,avg = P_t G_t G_r (lambda / 4 pi d)^2 in W.

    Args:
        p: System parameters.

    Returns:
        Received power in W. Linear in P_t, G_t and G_r and proportional to d^-2.
    """
    return p.transmit_power * p.tx_gain * p.rx_gain * path_loss(p)


def thermal_noise_power(p: SystemParams) -> float:
    """Antenna thermal noise power k_B T B in W."""
    return Boltzmann * p.temperature * p.bandwidth


def rec_noise_power(p: SystemParams) -> float:
    """Rectifier noise power P_rec in W."""
    return p.rec_noise_ratio * thermal_noise_power(p)


def lna_input_power(p: SystemParams) -> float:
    """Mean transmitted-power budget seen by the channel, G_LNA * P_rec,avg."""
    return p.lna_gain * received_power(p)


def average_snr(p: SystemParams) -> float:
    """Average noncentrality 2 P_rec,avg / P_th of the normalized received sample."""
    return 2.0 * received_power(p) / thermal_noise_power(p)


def diode_coefficients(p: SystemParams, order: DiodeOrder = DiodeOrder.FOURTH) -> DiodeCoeffs:
    """Taylor coefficients of the diode current.

    k2 = i_s R_ant / (2 (n v_t)^2) and k4 = i_s R_ant^2 / (24 (n v_t)^4).
    """
    nvt = p.ideality_factor * p.thermal_voltage
    k2 = p.saturation_current * p.antenna_resistance / (2.0 * nvt**2)
    k4 = p.saturation_current * p.antenna_resistance**2 / (24.0 * nvt**4)
    return DiodeCoeffs(k2=k2, k4=k4, order=order)
