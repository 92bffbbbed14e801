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
"""Loading and saving experiment configurations."""

import yaml
from awslabs.swipt_capacity.errors import ConfigError
from awslabs.swipt_capacity.models import ExperimentConfig
from loguru import logger
from pathlib import Path
from pydantic import ValidationError
from typing import Any, Dict, Optional, Union


def parse_config(text: str, source: str = '<string>') -> ExperimentConfig:
    """Validate a YAML (or JSON) document into an experiment configuration.

    Args:
        text: Document text. An empty document yields the defaults.
        source: Name used in error messages.

    Returns:
        The validated configuration.

    Raises:
        ConfigError: If the document does not parse or does not validate.
    """
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f'Cannot parse {source}: {e}') from e
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f'{source} must hold a mapping, not {type(data).__name__}')
    return validate_config(data, source)


def validate_config(data: Dict[str, Any], source: str = '<mapping>') -> ExperimentConfig:
    """Validate a plain mapping, wrapping validation errors in ``ConfigError``."""
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f'Invalid configuration in {source}: {e}') from e


def load_config(path: Optional[Union[str, Path]] = None) -> ExperimentConfig:
    """Read a configuration file, or return the defaults when no path is given."""
    if path is None:
        return ExperimentConfig()
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise ConfigError(f'Cannot read configuration {path}: {e}') from e
    logger.debug(f'Loaded configuration from {path}')
    return parse_config(text, str(path))


def dump_config(cfg: ExperimentConfig) -> str:
    """Serialize a configuration to YAML that ``parse_config`` reads back unchanged."""
    return yaml.safe_dump(cfg.model_dump(mode='json'), sort_keys=False)


def with_overrides(cfg: ExperimentConfig, **overrides: Any) -> ExperimentConfig:
    """Return ``cfg`` with the given top-level fields replaced and revalidated.

    ``None`` values leave the field untouched.
    """
    data = cfg.model_dump()
    data.update({k: v for k, v in overrides.items() if v is not None})
    return validate_config(data, '<command line>')
