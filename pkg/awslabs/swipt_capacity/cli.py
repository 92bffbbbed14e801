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
"""Command-line entry point: sweep, lemma1, validate and dump-config."""

import argparse
import os
import sys
from awslabs.swipt_capacity import __version__
from awslabs.swipt_capacity.config import dump_config, load_config, validate_config, with_overrides
from awslabs.swipt_capacity.errors import ConfigError, SwiptCapacityError, ValidationFailure
from awslabs.swipt_capacity.experiments import (
    run_capacity_sweep,
    run_lemma1_curve,
    require_passed,
    run_oracle_validation,
    sweep_converged,
    write_table,
)
from awslabs.swipt_capacity.models import ExperimentConfig, OutputFormat
from loguru import logger
from typing import List, Optional


logger.remove()
logger.add(sys.stderr, level=os.getenv('SWIPT_CAPACITY_LOG_LEVEL', 'WARNING'))

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NOT_CONVERGED = 2
EXIT_VALIDATION_FAILED = 3


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subcommand per experiment."""
    parser = argparse.ArgumentParser(
        prog='awslabs.swipt-capacity',
        description='Capacity of the SWIPT integrated receiver under a mean-power budget.',
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--log-level', help='Override SWIPT_CAPACITY_LOG_LEVEL')
    commands = parser.add_subparsers(dest='command', required=True)

    def common(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument('--config', help='YAML or JSON experiment configuration')
        sub.add_argument('--out', help='Output file; standard output when omitted')
        sub.add_argument('--format', choices=[f.value for f in OutputFormat])
        sub.add_argument('--seed', type=int)
        return sub

    sweep = common('sweep', 'Capacity estimates over the LNA gain sweep')
    sweep.add_argument('--exact-oracle', action='store_true', default=None)
    sweep.add_argument('--workers', type=int)

    lemma1 = common('lemma1', 'Normal approximation error of the noncentral chi-squared law')
    lemma1.add_argument('--k', type=int)
    lemma1.add_argument('--s', type=float, nargs='+', dest='s_list')

    validate = common('validate', 'Check the Gaussian transition law against oracles')
    validate.add_argument('--exact-oracle', action='store_true', default=None)
    validate.add_argument('--u-mult', type=float, nargs='+', dest='u_mults')
    validate.add_argument('--mc-count', type=int)
    validate.add_argument('--g-lna-db', type=float, help='LNA gain of the checked operating point')

    dump = commands.add_parser('dump-config', help='Print the effective configuration')
    dump.add_argument('--config', help='YAML or JSON experiment configuration')
    dump.add_argument('--out', help='Output file; standard output when omitted')
    return parser


def _effective_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_config(args.config)
    if getattr(args, 'g_lna_db', None) is not None:
        data = cfg.model_dump()
        data['validation']['g_lna_db'] = args.g_lna_db
        cfg = validate_config(data, '<command line>')
    return with_overrides(
        cfg,
        output_path=getattr(args, 'out', None),
        format=getattr(args, 'format', None),
        seed=getattr(args, 'seed', None),
        exact_oracle=getattr(args, 'exact_oracle', None),
        workers=getattr(args, 'workers', None),
    )


def _sweep(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    table = run_capacity_sweep(cfg)
    write_table(table, cfg.output_path, cfg.format)
    if not sweep_converged(table):
        logger.error('Some sweep points did not converge')
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _lemma1(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    k = cfg.lemma1.k if args.k is None else args.k
    s_list = cfg.lemma1.s_list if args.s_list is None else args.s_list
    table = run_lemma1_curve(k, s_list)
    write_table(table, cfg.output_path, cfg.format)
    return EXIT_OK if bool(table['converged'].all()) else EXIT_NOT_CONVERGED


def _validate(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    report = run_oracle_validation(cfg, args.u_mults, args.mc_count)
    write_table(report, cfg.output_path, cfg.format)
    try:
        require_passed(report)
    except ValidationFailure as e:
        logger.error(str(e))
        return EXIT_VALIDATION_FAILED
    return EXIT_OK


def _dump_config(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    text = dump_config(cfg)
    if cfg.output_path is None:
        sys.stdout.write(text)
    else:
        with open(cfg.output_path, 'w', encoding='utf-8') as f:
            f.write(text)
    return EXIT_OK


COMMANDS = {
    'sweep': _sweep,
    'lemma1': _lemma1,
    'validate': _validate,
    'dump-config': _dump_config,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run the requested experiment and return the exit code."""
    args = build_parser().parse_args(argv)
    if args.log_level:
        logger.remove()
        logger.add(sys.stderr, level=args.log_level.upper())
    try:
        cfg = _effective_config(args)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as e:
        logger.error(str(e))
        return EXIT_CONFIG
    except SwiptCapacityError as e:
        logger.error(str(e))
        return EXIT_NOT_CONVERGED


if __name__ == '__main__':
    sys.exit(main())
