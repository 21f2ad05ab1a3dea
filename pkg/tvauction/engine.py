"""
Co-evolution of the learned strategy and the value distribution, with
time-average payoffs in first-price (learning) and second-price
(truthful, always at equilibrium) auctions.

On each step the distribution is held fixed, x advances by one RK4 step,
and the first-price payoff is averaged over the four RK4 stage points
with weights 1-2-2-1. With this step quadrature
``h * (w_dagger - w_star) == alpha * width * dx / eta`` holds step by step,
so the telescoping identities of the theory hold at step resolution.
"""
import enum
import logging
import math
import os
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pandas as pd
import toml

from .auction import AuctionConfig
from .common import ConfigError, RunConfig
from .environments import FiniteStateSchedule, Schedule
from .learning import DynamicsConfig, rk4_increment

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ['t', 'x', 'v_m', 'v_M', 'w_dagger', 'w_star',
                 'cum_avg_dagger', 'cum_avg_star']


class HypothesisError(ValueError):
    pass


class Verdict(enum.Enum):
    FIRST_HIGHER = 'FIRST_HIGHER'
    SECOND_HIGHER = 'SECOND_HIGHER'
    EQUIVALENT = 'EQUIVALENT'
    UNDETERMINED = 'UNDETERMINED'


RunSummary = namedtuple('RunSummary', [
    'T', 'w_bar_dagger', 'w_bar_star', 'gap', 'path_length', 'path_rate',
    'bound_low', 'bound_high', 'exact_two_state_gap', 'verdict',
    'total_ascent', 'total_descent', 'x_initial', 'x_final', 'x_amplitude',
    'width_max', 'envelope', 'steps', 'switches', 'guard_triggers'])

_OPTIONAL = ('bound_low', 'bound_high', 'exact_two_state_gap')


class SimulationTrace:
    """Thinned time series of a run, one row every ``record_every`` steps.

    Attributes:
        frame (pandas.DataFrame): columns as in ``TRACE_COLUMNS``
    """

    def __init__(self, frame: pd.DataFrame):
        self.frame = frame

    def __len__(self):
        return len(self.frame)

    def to_csv(self, path):
        self.frame.to_csv(str(path), index=False, float_format='%.17g')

    @classmethod
    def from_csv(cls, path):
        frame = pd.read_csv(str(path), float_precision='round_trip')
        return cls(frame[TRACE_COLUMNS])


def write_trace(path, trace: SimulationTrace):
    trace.to_csv(path)


def read_trace(path):
    return SimulationTrace.from_csv(path)


def step_count(T, h):
    """Number of steps of size ``h`` covering ``[0, T]``.

    Raises:
        ConfigError: ``T`` is not a positive multiple of ``h``
    """
    if not T > 0:
        raise ConfigError('T', 'must be positive, got %r' % (T,))
    steps = int(round(T / h))
    if steps < 1 or abs(steps * h - T) > 1e-9 * T:
        raise ConfigError('T', '%r is not a multiple of h=%r' % (T, h))
    return steps


def run(cfg: AuctionConfig, dyn: DynamicsConfig, schedule: Schedule, T,
        seed, record_every=100, quadrature='stage'):
    """Integrate from ``x(0) = v_m(0)`` up to ``T``.

    Args:
        quadrature (str): ``'stage'`` averages w_dagger over the RK4
            stages of each step; ``'left'`` takes it at the step start

    Returns:
        (SimulationTrace, RunSummary)
    """
    if quadrature not in ('stage', 'left'):
        raise ValueError('unknown quadrature %r' % quadrature)
    if record_every < 1:
        raise ConfigError('record_every', 'must be at least 1')
    h = dyn.h
    steps = step_count(T, h)
    rng = np.random.default_rng(seed)
    schedule.reset(h)
    logger.info('run: n=%d eta=%g h=%g T=%g seed=%s schedule=%s',
                cfg.n, dyn.eta, h, T, seed, schedule)

    x = np.empty(steps + 1)
    v_m = np.empty(steps)
    v_M = np.empty(steps)
    offset = np.empty(steps)
    stage = quadrature == 'stage'

    d = schedule.at(rng, 0.0)
    xk = d.v_m
    x[0] = xk
    report = max(1, steps // 10)
    for k in range(steps):
        if k:
            d = schedule.at(rng, k * h)
        dx, off = rk4_increment(cfg, dyn, xk, d)
        v_m[k] = d.v_m
        v_M[k] = d.v_M
        offset[k] = off if stage else xk - d.v_m
        xk = xk + dx
        x[k + 1] = xk
        if (k + 1) % report == 0:
            logger.debug('t=%g x=%.6g v=(%g, %g)', (k + 1) * h, xk,
                         d.v_m, d.v_M)

    n = cfg.n
    width = v_M - v_m
    w_star = width / (n * (n + 1))
    w_dagger = w_star - offset / n ** 2
    dx = np.diff(x)

    w_bar_dagger = math.fsum(w_dagger) / steps
    w_bar_star = math.fsum(w_star) / steps
    path_length = math.fsum(np.abs(dx))
    x_amplitude = float(x.max() - x.min())
    width_max = float(width.max())
    envelope = 3 * cfg.alpha * width_max * x_amplitude / (dyn.eta * T)
    gap = w_bar_dagger - w_bar_star

    summary = RunSummary(
        T=float(T),
        w_bar_dagger=w_bar_dagger,
        w_bar_star=w_bar_star,
        gap=gap,
        path_length=path_length,
        path_rate=path_length / T,
        bound_low=None,
        bound_high=None,
        exact_two_state_gap=None,
        verdict=verdict(gap, envelope),
        total_ascent=math.fsum(dx[dx > 0]),
        total_descent=math.fsum(-dx[dx < 0]),
        x_initial=float(x[0]),
        x_final=float(x[-1]),
        x_amplitude=x_amplitude,
        width_max=width_max,
        envelope=envelope,
        steps=steps,
        switches=schedule.switches,
        guard_triggers=getattr(schedule, 'guard_triggers', 0))
    summary = _with_bounds(summary, schedule, cfg, dyn)

    rows = np.arange(0, steps, record_every)
    cum = np.arange(1, steps + 1)
    x_rec = x[rows]
    frame = pd.DataFrame({
        't': rows * h,
        'x': x_rec,
        'v_m': v_m[rows],
        'v_M': v_M[rows],
        'w_dagger': w_star[rows] - (x_rec - v_m[rows]) / n ** 2,
        'w_star': w_star[rows],
        'cum_avg_dagger': (np.cumsum(w_dagger) / cum)[rows],
        'cum_avg_star': (np.cumsum(w_star) / cum)[rows],
    }, columns=TRACE_COLUMNS)

    logger.info('done: gap=%.6g path_rate=%.6g verdict=%s', summary.gap,
                summary.path_rate, summary.verdict.name)
    return SimulationTrace(frame), summary


def verdict(gap, envelope):
    """Classify a time-average gap against the finite-horizon envelope of
    boundary terms."""
    if abs(gap) <= envelope:
        return Verdict.EQUIVALENT
    if abs(gap) <= 1.1 * envelope:
        return Verdict.UNDETERMINED
    return Verdict.FIRST_HIGHER if gap > 0 else Verdict.SECOND_HIGHER


def _with_bounds(summary, schedule, cfg, dyn):
    if not isinstance(schedule, FiniteStateSchedule):
        return summary
    states = schedule.states
    if len(states) < 2 or not schedule.strictly_ordered:
        return summary
    fields = {}
    for name, fn in (('bound_low', theorem_lower_bound),
                     ('bound_high', theorem_upper_bound)):
        try:
            fields[name] = fn(summary, states, cfg, dyn)
        except HypothesisError:
            pass
    if len(states) == 2:
        fields['exact_two_state_gap'] = exact_two_state_gap(
            summary, states, cfg, dyn)
    return summary._replace(**fields)


def _width_steps(states):
    """Differences of consecutive widths, states ordered by v_m."""
    ordered = sorted(states, key=lambda d: d.v_m)
    mins = [d.v_m for d in ordered]
    if any(a >= b for a, b in zip(mins, mins[1:])):
        raise HypothesisError('minimum values must be pairwise distinct')
    widths = [d.width for d in ordered]
    return [b - a for a, b in zip(widths, widths[1:])]


def theorem_lower_bound(summary: RunSummary, states, cfg: AuctionConfig,
                        dyn: DynamicsConfig):
    """Asymptotic lower bound on the gap when widths strictly increase
    with the minimum value.

    Raises:
        HypothesisError: widths are not strictly increasing
    """
    diffs = _width_steps(states)
    if not diffs or min(diffs) <= 0:
        raise HypothesisError('widths must strictly increase with v_m')
    return 0.5 * cfg.alpha * min(diffs) * summary.path_rate / dyn.eta


def theorem_upper_bound(summary: RunSummary, states, cfg: AuctionConfig,
                        dyn: DynamicsConfig):
    """Asymptotic upper bound on the gap when widths strictly decrease
    with the minimum value.

    Raises:
        HypothesisError: widths are not strictly decreasing
    """
    diffs = _width_steps(states)
    if not diffs or max(diffs) >= 0:
        raise HypothesisError('widths must strictly decrease with v_m')
    return 0.5 * cfg.alpha * max(diffs) * summary.path_rate / dyn.eta


def exact_two_state_gap(summary: RunSummary, states, cfg: AuctionConfig,
                        dyn: DynamicsConfig, boundary=False):
    """Gap predicted from the time-average path length for two states.

    Args:
        boundary (bool): include the finite-horizon term in
            ``x(T) - x(0)``; the prediction then matches the measured gap
            to rounding

    Raises:
        HypothesisError: not exactly two states
    """
    if len(states) != 2:
        raise HypothesisError('two states required, got %d' % len(states))
    (diff,) = _width_steps(states)
    gap = 0.5 * cfg.alpha * diff * summary.path_rate / dyn.eta
    if boundary:
        total = sum(d.width for d in states)
        gap += (0.5 * cfg.alpha * total
                * (summary.x_final - summary.x_initial)
                / (dyn.eta * summary.T))
    return gap


def telescoped_gap(summary: RunSummary, cfg: AuctionConfig,
                   dyn: DynamicsConfig, width):
    """Gap implied by a constant width: alpha * width * (x(T) - x(0)) /
    (eta * T)."""
    return (cfg.alpha * width * (summary.x_final - summary.x_initial)
            / (dyn.eta * summary.T))


def ascent_descent_residual(summary: RunSummary):
    """|total ascent - total descent - (x(T) - x(0))|."""
    return abs(summary.total_ascent - summary.total_descent
               - (summary.x_final - summary.x_initial))


def gap_identity_check(trace: SimulationTrace, cfg: AuctionConfig,
                       dyn: DynamicsConfig = None):
    """Largest violation of ``w_dagger - w_star == -(x - v_m) / n**2``
    over the trace rows."""
    f = trace.frame
    if not len(f):
        return 0.0
    residual = (f['w_dagger'] - f['w_star']) + (f['x'] - f['v_m']) / cfg.n ** 2
    return float(np.abs(residual).max())


def summary_dict(summary: RunSummary, params=None):
    """Flat mapping written to ``summary.toml``."""
    flat = {}
    for key, value in summary._asdict().items():
        if value is None:
            continue
        flat[key] = value.name if isinstance(value, Verdict) else value
    for key, value in (params or {}).items():
        if key not in flat and value is not None:
            flat[key] = value
    return flat


def write_summary(path, summary: RunSummary, params=None):
    with open(str(path), 'w') as f:
        toml.dump(summary_dict(summary, params), f)


def read_summary(path):
    """Parse a summary file.

    Returns:
        (RunSummary, dict): the summary and the echoed run parameters
    """
    with open(str(path)) as f:
        flat = toml.load(f)
    values = {}
    for key in RunSummary._fields:
        if key in _OPTIONAL:
            values[key] = flat.pop(key, None)
        else:
            values[key] = flat.pop(key)
    values['verdict'] = Verdict[values['verdict']]
    return RunSummary(**values), flat


def run_params(config: RunConfig, seed, schedule: Schedule):
    params = {'n': config.n, 'eta': config.eta, 'h': config.h,
              'seed': seed, 'record_every': config.record_every,
              'schedule': config.schedule}
    params.update(schedule.params())
    return params


def run_config(config: RunConfig, seed=None):
    """Run a validated configuration.

    Returns:
        (SimulationTrace, RunSummary, dict): trace, summary and the run
        parameters to echo
    """
    if seed is None:
        seed = config.seed
    schedule = config.build_schedule()
    trace, summary = run(AuctionConfig(config.n),
                         DynamicsConfig(config.eta, config.h), schedule,
                         config.T, seed, config.record_every)
    return trace, summary, run_params(config, seed, schedule)


def batch_workers(count, workers=None):
    """Worker processes for ``count`` seeds; at most one per CPU unless
    ``workers`` is given."""
    if workers is None:
        workers = min(count, os.cpu_count() or 1)
    return max(1, min(workers, count))


def run_batch(config: RunConfig, seeds, workers=None):
    """Run independent seeds, in parallel worker processes when
    ``workers > 1``. Results come back in the order of ``seeds``."""
    seeds = list(seeds)
    workers = batch_workers(len(seeds), workers)
    if workers <= 1:
        return [run_config(config, s) for s in seeds]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_config, [config] * len(seeds), seeds))
