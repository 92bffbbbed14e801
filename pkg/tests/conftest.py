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
"""Configuration for pytest."""

import pytest
from awslabs.swipt_capacity.models import ChannelConsts


def pytest_addoption(parser):
    """Add command-line options to pytest."""
    parser.addoption(
        '--run-slow',
        action='store_true',
        default=False,
        help='Run full sweeps and large Monte-Carlo oracles',
    )


def pytest_configure(config):
    """Configure pytest."""
    config.addinivalue_line('markers', 'slow: mark test as a full sweep or a large oracle run')


def pytest_collection_modifyitems(config, items):
    """Skip slow tests unless --run-slow is specified."""
    if not config.getoption('--run-slow'):
        skip_slow = pytest.mark.skip(reason='need --run-slow option to run')
        for item in items:
            if 'slow' in item.keywords:
                item.add_marker(skip_slow)


@pytest.fixture
def small_consts():
    """Channel with s = u and moderate quartic distortion, cheap to discretize."""
    return ChannelConsts(a2=1.0, a4=0.05, p_rec=1.0, thermal_power=2.0)
