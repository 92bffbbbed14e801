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
"""Experiment drivers producing the result tables."""

import math
import numpy as np
import pandas as pd
import sys
from awslabs.swipt_capacity.channel import (
    channel_consts,
    ks_distance_exact,
    ks_distance_to_gaussian,
    l1_density_distance,
    monte_carlo_samples,
    transition_gaussian,
)
from awslabs.swipt_capacity.discretize import discretize
from awslabs.swipt_capacity.errors import (
    ConfigError,
    QuadratureError,
    SwiptCapacityError,
    ValidationFailure,
)
from awslabs.swipt_capacity.infotheory import blahut_arimoto, lower_bound
from awslabs.swipt_capacity.models import (
    CapacityResult,
    DiodeOrder,
    ExperimentConfig,
    Method,
    Ncx2,
    OutputFormat,
    SweepRow,
)
from awslabs.swipt_capacity.phys import lna_input_power
from awslabs.swipt_capacity.stats import cdf_l2_distance
from concurrent.futures import BrokenExecutor, ProcessPoolExecutor
from loguru import logger
from typing import Dict, List, Optional, Sequence, Tuple


SWEEP_COLUMNS = ['g_lna_db', 'method', 'bits', 'alpha_opt', 'converged', 'constraint_gap']
LEMMA1_COLUMNS = ['s', 'l2_distance', 'abs_error', 'converged']
VALIDATION_COLUMNS = ['u_mult', 'u', 'check', 'value', 'threshold', 'passed']
FLOAT_FORMAT = '%.12g'

# Fixed-family bounds first, so Blahut-Arimoto can start from the best gamma law.
_EVALUATION_ORDER = [
    Method.GAMMA,
    Method.RAYLEIGH,
    Method.UNIFORM,
    Method.BLAHUT_ARIMOTO,
    Method.SECOND_ORDER,
]


def _solve(method: Method, cfg: ExperimentConfig, g_db: float, cache: Dict) -> CapacityResult:
    params = cfg.system.to_params(g_db)
    mean = lna_input_power(params)
    if method == Method.SECOND_ORDER:
        c2 = channel_consts(params, DiodeOrder.SECOND_ONLY)
        return blahut_arimoto(
            c2,
            mean,
            cfg.quadrature,
            tol=cfg.solver.tol,
            max_iter=cfg.solver.max_iter,
            exact=cfg.exact_oracle,
            method=Method.SECOND_ORDER,
        )
    c4 = channel_consts(params, DiodeOrder.FOURTH)
    if 'channel' not in cache:
        cache['channel'] = discretize(c4, mean, cfg.quadrature, exact=cfg.exact_oracle)
    channel = cache['channel']
    if method == Method.BLAHUT_ARIMOTO:
        start = cache.get(Method.GAMMA)
        return blahut_arimoto(
            c4,
            mean,
            cfg.quadrature,
            tol=cfg.solver.tol,
            max_iter=cfg.solver.max_iter,
            channel=channel,
            initial=start.law if start is not None else None,
        )
    return lower_bound(method, c4, mean, cfg.quadrature, channel)


def evaluate_point(task: Tuple[ExperimentConfig, float]) -> List[SweepRow]:
    """Evaluate every configured method at one LNA gain.

    A failing method yields a row with NaN bits and ``converged`` false; the other methods
    still run.
    """
    cfg, g_db = task
    wanted = set(cfg.methods)
    if Method.BLAHUT_ARIMOTO in wanted:
        wanted.add(Method.GAMMA)
    cache: Dict = {}
    rows: Dict[Method, SweepRow] = {}
    for method in _EVALUATION_ORDER:
        if method not in wanted:
            continue
        try:
            result = _solve(method, cfg, g_db, cache)
            cache[method] = result
            rows[method] = SweepRow(
                g_lna_db=g_db,
                method=method,
                bits=result.bits,
                alpha_opt=result.law.alpha if method == Method.GAMMA else None,
                converged=result.converged,
                constraint_gap=result.constraint_gap,
            )
        except (SwiptCapacityError, ValueError, ArithmeticError) as e:
            logger.error(f'{method.value} failed at G_LNA = {g_db} dB: {e}')
            rows[method] = SweepRow(
                g_lna_db=g_db,
                method=method,
                bits=math.nan,
                converged=False,
                constraint_gap=math.nan,
            )
    logger.info(
        f'G_LNA = {g_db} dB: '
        + ', '.join(f'{m.value}={rows[m].bits:.4f}' for m in cfg.methods)
    )
    return [rows[m] for m in cfg.methods]


def run_capacity_sweep(cfg: ExperimentConfig) -> pd.DataFrame:
    """Capacity estimates for every configured method over the LNA gain sweep.

    Sweep points run in ``cfg.workers`` processes; rows come back in sweep order.

    Raises:
        SwiptCapacityError: If the worker pool breaks.
    """
    tasks = [(cfg, g_db) for g_db in cfg.sweep.values()]
    logger.info(f'Sweeping {len(tasks)} LNA gains with {cfg.workers} worker(s)')
    if cfg.workers > 1:
        try:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                chunks = list(pool.map(evaluate_point, tasks))
        except BrokenExecutor as e:
            raise SwiptCapacityError(f'sweep worker pool failed: {e}') from e
    else:
        chunks = [evaluate_point(task) for task in tasks]
    records = [
        {**row.model_dump(), 'method': row.method.value} for chunk in chunks for row in chunk
    ]
    return pd.DataFrame.from_records(records, columns=SWEEP_COLUMNS)


def sweep_converged(table: pd.DataFrame) -> bool:
    """Whether every row of a sweep converged."""
    return bool(table['converged'].all())


def run_lemma1_curve(k: int, s_list: Sequence[float]) -> pd.DataFrame:
    """CDF L2 distance between the noncentral chi-squared law and its normal approximation.

    Args:
        k: Degrees of freedom, 1 or 2.
        s_list: Noncentralities to evaluate.

    Returns:
        One row per noncentrality, in the given order.
    """
    if k not in (1, 2):
        raise ConfigError('k must be 1 or 2')
    if not s_list or min(s_list) < 0:
        raise ConfigError('s_list must be non-empty and nonnegative')
    records = []
    for s in s_list:
        try:
            distance = cdf_l2_distance(Ncx2(k=k, s=s))
            records.append((s, distance.value, distance.abs_error, True))
        except SwiptCapacityError as e:
            logger.error(f'L2 distance at s = {s}: {e}')
            records.append((s, math.nan, getattr(e, 'achieved', math.nan), False))
    return pd.DataFrame.from_records(records, columns=LEMMA1_COLUMNS)


def _oracle_check(name: str, metric, u: float, c, cfg: ExperimentConfig) -> float:
    # NaN never passes a threshold, so an unresolved exact density is a failed check.
    try:
        return metric(u, c, cfg.quadrature)
    except QuadratureError as e:
        logger.error(f'{name} oracle at u = {u:.4g}: {e}')
        return math.nan


def run_oracle_validation(
    cfg: ExperimentConfig,
    u_mults: Optional[Sequence[float]] = None,
    mc_count: Optional[int] = None,
) -> pd.DataFrame:
    """Check the Gaussian transition law against Monte-Carlo and exact oracles.

    For each input power the sample mean and variance are compared in standard errors, the
    samples are scored by a Kolmogorov-Smirnov test and the exact density by its L1 distance.
    With ``cfg.exact_oracle`` the exact law is also scored by its largest CDF difference.

    Args:
        cfg: Configuration; ``cfg.validation`` sets the operating point and thresholds.
        u_mults: Input powers as multiples of the mean budget, overriding the configuration.
        mc_count: Monte-Carlo sample count, overriding the configuration.

    Returns:
        One row per (input power, check).
    """
    v = cfg.validation
    u_mults = list(v.u_mults if u_mults is None else u_mults)
    count = v.mc_count if mc_count is None else mc_count
    if count < 100_000:
        raise ConfigError(f'mc_count must be at least 100000, got {count}')
    if not u_mults or min(u_mults) < 0:
        raise ConfigError('u_mults must be non-empty and nonnegative')
    params = cfg.system.to_params(v.g_lna_db)
    mean = lna_input_power(params)
    c = channel_consts(params, DiodeOrder.FOURTH)
    records = []
    for mult in u_mults:
        u = mult * mean
        g = transition_gaussian(u, c)
        samples = monte_carlo_samples(u, c, count, cfg.seed, v.shards)
        sd = float(np.std(samples, ddof=1))
        mean_z = abs(float(np.mean(samples)) - g.mu) / (sd / math.sqrt(count))
        centered = samples - samples.mean()
        var_hat = sd**2
        fourth = float(np.mean(centered**4))
        var_z = abs(var_hat - g.var) / math.sqrt(max(fourth - var_hat**2, 0.0) / count)
        checks = [
            ('mean', mean_z, v.moment_sigmas),
            ('variance', var_z, v.moment_sigmas),
            ('ks', ks_distance_to_gaussian(samples, g), v.ks_threshold),
            ('l1', _oracle_check('l1', l1_density_distance, u, c, cfg), v.l1_threshold),
        ]
        if cfg.exact_oracle:
            ks_exact = _oracle_check('ks_exact', ks_distance_exact, u, c, cfg)
            checks.append(('ks_exact', ks_exact, v.ks_threshold))
        for name, value, threshold in checks:
            passed = bool(value <= threshold)
            if not passed:
                logger.warning(
                    f'{name} = {value:.4g} exceeds {threshold:.4g} at u = {mult} x mean'
                )
            records.append((mult, u, name, value, threshold, passed))
    return pd.DataFrame.from_records(records, columns=VALIDATION_COLUMNS)


def validation_passed(report: pd.DataFrame) -> bool:
    """Whether every check of a validation report passed."""
    return bool(report['passed'].all())


def require_passed(report: pd.DataFrame) -> None:
    """Raise ``ValidationFailure`` naming the failed checks, if any."""
    failed = report.loc[~report['passed'].astype(bool)]
    if not failed.empty:
        names = ', '.join(f'{row.check} at {row.u_mult:g} x mean' for row in failed.itertuples())
        raise ValidationFailure(f'validation failed: {names}', report)


def write_table(
    table: pd.DataFrame, path: Optional[str] = None, fmt: OutputFormat = OutputFormat.CSV
) -> None:
    """Write a result table as CSV or as a JSON list of records.

    Args:
        table: The table.
        path: Destination file; standard output when omitted.
        fmt: Serialization.
    """
    target = path if path is not None else sys.stdout
    if fmt == OutputFormat.JSON:
        text = table.to_json(orient='records', indent=2, double_precision=12)
        if path is None:
            sys.stdout.write(text + '\n')
        else:
            with open(path, 'w', encoding='utf-8') as f:
                f.write(text + '\n')
    else:
        table.to_csv(target, index=False, float_format=FLOAT_FORMAT)
    if path is not None:
        logger.info(f'Wrote {len(table)} rows to {path}')
