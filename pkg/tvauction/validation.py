"""
Cross-checks of the closed forms against finite differences, quadrature and
Monte-Carlo estimates.
"""
import itertools
import logging
from collections import namedtuple

import numpy as np

from . import oracle
from .auction import (AuctionConfig, ValueDistribution,
                      equilibrium_payoff_by_quadrature, expected_revenue,
                      revenue_by_quadrature)
from .learning import (deviant_payoff, equilibrium_payoff,
                       homogeneous_payoff, payoff_gradient)
from .util import colored

logger = logging.getLogger(__name__)

Check = namedtuple('Check', ['name', 'observed', 'tolerance', 'passed'])

Z = 3.0
GRADIENT_RTOL = 1e-6
QUADRATURE_RTOL = 1e-10

GRID_N = (2, 3, 5, 10, 20)
GRID_SUPPORTS = ((0.0, 1.0), (10.0, 20.0), (20.0, 40.0), (10.0, 30.0),
                 (-5.0, 5.0))
# x as v_m + offset * width; spans below, inside and above the support
GRID_OFFSETS = (-0.5, 0.25, 0.5, 0.9, 1.5)

REVENUE_CASES = ((2, (0.0, 1.0)), (3, (0.0, 1.0)), (10, (10.0, 20.0)))

PAYOFF_CASE = (10, (10.0, 20.0))
# (x_dev, x_pop) on either side of each other
DEVIANT_PAIRS = ((10.0, 10.0), (11.0, 10.0), (10.0, 11.0), (12.0, 11.0),
                 (11.0, 12.0), (10.5, 13.0), (13.0, 10.5), (15.0, 14.0),
                 (14.0, 15.0), (9.0, 10.0), (10.0, 9.0), (12.0, 12.5))
HOMOGENEOUS_X = (10.0, 11.0, 13.0)

MIN_BIN_COUNT = 30


def _seed(seed, index):
    return np.random.SeedSequence([seed, index])


def _relative(observed, expected):
    return abs(observed - expected) / max(abs(expected), 1e-300)


def check_gradient():
    """Finite differences of the deviant payoff at ``x' = x`` against the
    analytic gradient."""
    worst_central = 0.0
    worst_sides = 0.0
    for n, support, offset in itertools.product(GRID_N, GRID_SUPPORTS,
                                                GRID_OFFSETS):
        cfg = AuctionConfig(n)
        d = ValueDistribution(*support)
        x = d.v_m + offset * d.width
        eps = 1e-8 * d.width
        g = payoff_gradient(cfg, d, x)
        w = deviant_payoff(cfg, d, x, x)
        up = deviant_payoff(cfg, d, x + eps, x)
        down = deviant_payoff(cfg, d, x - eps, x)
        worst_central = max(worst_central,
                            _relative((up - down) / (2 * eps), g))
        left = (w - down) / eps
        right = (up - w) / eps
        worst_sides = max(worst_sides, abs(left - right) / abs(g))
    return [
        Check('gradient central difference', worst_central, GRADIENT_RTOL,
              worst_central <= GRADIENT_RTOL),
        Check('gradient one-sided continuity', worst_sides, GRADIENT_RTOL,
              worst_sides <= GRADIENT_RTOL),
    ]


def check_quadrature():
    checks = []
    for n, support in REVENUE_CASES:
        cfg = AuctionConfig(n)
        d = ValueDistribution(*support)
        err = _relative(equilibrium_payoff_by_quadrature(cfg, d),
                        equilibrium_payoff(cfg, d))
        checks.append(Check('equilibrium payoff quadrature n=%d d=%s'
                            % (n, support), err, QUADRATURE_RTOL,
                            err <= QUADRATURE_RTOL))
        err = _relative(revenue_by_quadrature(cfg, d),
                        expected_revenue(cfg, d))
        checks.append(Check('revenue quadrature n=%d d=%s' % (n, support),
                            err, QUADRATURE_RTOL, err <= QUADRATURE_RTOL))
    return checks


def _against(name, estimate, expected, z=Z):
    observed = abs(estimate.mean - expected)
    tolerance = z * estimate.std_error
    return Check(name, observed, tolerance, observed <= tolerance)


def check_payoffs(samples, seed, workers=None):
    """Closed-form homogeneous and deviant payoffs against Monte-Carlo."""
    n, support = PAYOFF_CASE
    cfg = AuctionConfig(n)
    d = ValueDistribution(*support)
    checks = []
    for i, x in enumerate(HOMOGENEOUS_X):
        estimate = oracle.estimate_homogeneous_payoff(
            cfg, d, x, samples, _seed(seed, 100 + i), workers)
        checks.append(_against('homogeneous payoff x=%g' % x, estimate,
                               homogeneous_payoff(cfg, d, x)))
    for i, (x_dev, x_pop) in enumerate(DEVIANT_PAIRS):
        estimate = oracle.estimate_deviant_payoff(
            cfg, d, x_dev, x_pop, samples, _seed(seed, 200 + i), workers)
        checks.append(_against('deviant payoff x\'=%g x=%g' % (x_dev, x_pop),
                               estimate, deviant_payoff(cfg, d, x_dev,
                                                        x_pop)))
    return checks


def check_revenue_equivalence(samples, seed, bid_slope=None, workers=None):
    """Static revenue equivalence of the two formats.

    Args:
        bid_slope (callable): maps n to a first-price bidding slope that
            replaces alpha
    """
    checks = []
    for i, (n, support) in enumerate(REVENUE_CASES):
        cfg = AuctionConfig(n)
        d = ValueDistribution(*support)
        slope = None if bid_slope is None else bid_slope(n)
        first, second = oracle.check_static_revenue_equivalence(
            cfg, d, samples, _seed(seed, 300 + i), bid_slope=slope,
            workers=workers)
        expected = expected_revenue(cfg, d)
        label = 'n=%d d=%s' % (n, support)
        observed = abs(first.mean - second.mean)
        tolerance = Z * first.combined_se(second)
        checks.append(Check('revenue first vs second ' + label, observed,
                            tolerance, observed <= tolerance))
        checks.append(_against('revenue first vs closed form ' + label,
                               first, expected))
        checks.append(_against('revenue second vs closed form ' + label,
                               second, expected))
    return checks


def check_conditional_payment(samples, seed, workers=None):
    """Second-price payment conditional on the winning value against f(v).

    Passes when at least 95% of populated bins lie within 3 standard errors
    and all of them within 5.
    """
    n, support = PAYOFF_CASE
    cfg = AuctionConfig(n)
    d = ValueDistribution(*support)
    bins = oracle.estimate_conditional_payment(
        cfg, d, oracle.AuctionKind.SECOND_PRICE, samples, _seed(seed, 400),
        workers=workers)
    bins = bins[bins['count'] >= MIN_BIN_COUNT]
    if not len(bins):
        return [Check('conditional payment f(v)', 0.0, 0.95, False)]
    z = ((bins['mean_payment'] - bins['mean_expected']).abs()
         / bins['std_error'].where(bins['std_error'] > 0, np.inf))
    inside = float((z <= 3).mean())
    passed = inside >= 0.95 and bool((z <= 5).all())
    return [Check('conditional payment f(v), share within 3 SE', inside,
                  0.95, passed)]


def run_battery(samples=10 ** 6, seed=1, bid_slope=None, workers=None):
    """Run every check.

    Returns:
        list of Check
    """
    if samples < oracle.MIN_SAMPLES:
        raise ValueError('at least %d samples required, got %d'
                         % (oracle.MIN_SAMPLES, samples))
    checks = []
    checks += check_gradient()
    checks += check_quadrature()
    logger.info('analytic checks done, sampling %d auctions per estimate',
                samples)
    checks += check_payoffs(samples, seed, workers)
    checks += check_revenue_equivalence(samples, seed, bid_slope, workers)
    checks += check_conditional_payment(samples, seed, workers)
    for c in checks:
        if not c.passed:
            logger.warning('check failed: %s observed=%.6g tolerance=%.6g',
                           c.name, c.observed, c.tolerance)
    return checks


def format_table(checks, color=True):
    width = max(len(c.name) for c in checks)
    lines = ['%-*s  %12s  %12s  %s' % (width, 'check', 'observed',
                                       'tolerance', 'result')]
    for c in checks:
        result = 'PASS' if c.passed else 'FAIL'
        if color:
            result = colored(result, 'g' if c.passed else 'r', style='b')
        lines.append('%-*s  %12.4g  %12.4g  %s' % (width, c.name, c.observed,
                                                   c.tolerance, result))
    return '\n'.join(lines)
