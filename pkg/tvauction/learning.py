"""
Adaptive dynamics of the shared first-price bidding strategy
``b(v) = alpha * (v - x) + x``.

A population bidding with intercept ``x`` is invaded by a deviant bidding
with ``x'``; the population follows the deviant's payoff gradient at
``x' = x``, accelerated by the learning rate ``eta``.
"""
import math
from collections import namedtuple

from scipy import integrate

from .auction import AuctionConfig, ValueDistribution, cdf


LearnerState = namedtuple('LearnerState', ['x', 't'])


class DynamicsConfig(namedtuple('DynamicsConfig', ['eta', 'h'])):
    """Learning rate ``eta`` and integration step ``h``."""

    __slots__ = ()

    def __new__(cls, eta=2e3, h=1e-3):
        eta, h = float(eta), float(h)
        if not eta > 0:
            raise ValueError('eta must be positive, got %r' % eta)
        if not h > 0:
            raise ValueError('h must be positive, got %r' % h)
        return super().__new__(cls, eta, h)


def deviant_payoff(cfg: AuctionConfig, d: ValueDistribution, x_dev, x_pop):
    """Expected payoff w(x', x) of one bidder using intercept ``x_dev``
    against n-1 bidders using ``x_pop``.

    Evaluated from the polynomial antiderivatives of the two piecewise
    integrands (the deviant outbids the population when ``x_dev >= x_pop``
    and underbids it otherwise).
    """
    n = cfg.n
    width = d.width
    if x_dev >= x_pop:
        c = (x_dev - x_pop) / (n - 1)
        if c >= width:
            # always wins
            return ((d.v_m + d.v_M) / 2 - x_dev) / n
        r = c / width
        offset = x_dev + c - d.v_m
        return (width * (1 - r ** (n + 1)) / (n + 1)
                - offset * (1 - r ** n) / n
                + c * (d.v_M - c / 2 - x_dev) / width) / n
    c = (x_pop - x_dev) / (n - 1)
    if c >= width:
        # never wins
        return 0.0
    length = width - c
    r = length / width
    offset = x_dev - d.v_m - c
    return (length * r ** n / (n + 1) - offset * r ** n / n) / n


def deviant_payoff_by_quadrature(cfg: AuctionConfig, d: ValueDistribution,
                                 x_dev, x_pop):
    """Numerical counterpart of :func:`deviant_payoff` for debugging."""
    n = cfg.n
    shift = (x_dev - x_pop) / (n - 1)

    def integrand(v):
        rival = min(max(v + shift, d.v_m), d.v_M)
        return (v - x_dev) / n / d.width * cdf(d, rival) ** (n - 1)

    points = [p for p in (d.v_M - shift, d.v_m - shift)
              if d.v_m < p < d.v_M]
    value, _ = integrate.quad(integrand, d.v_m, d.v_M, points=points or None,
                              epsabs=0, epsrel=1e-12, limit=200)
    return value


def payoff_gradient(cfg: AuctionConfig, d: ValueDistribution, x):
    """Raw gradient of w(x', x) in x' at x' = x (no learning rate)."""
    return -(x - d.v_m) / (cfg.n * (cfg.n - 1) * d.width)


def homogeneous_payoff(cfg: AuctionConfig, d: ValueDistribution, x):
    """Per-bidder payoff w(x, x) when every bidder uses intercept ``x``."""
    return d.width / (cfg.n * (cfg.n + 1)) - (x - d.v_m) / cfg.n ** 2


def equilibrium_payoff(cfg: AuctionConfig, d: ValueDistribution):
    """Per-bidder payoff at equilibrium, also the second-price payoff."""
    return d.width / (cfg.n * (cfg.n + 1))


def decay_rate(cfg: AuctionConfig, dyn: DynamicsConfig, d: ValueDistribution):
    """Rate at which x relaxes to v_m while d stays fixed."""
    return dyn.eta / (cfg.n * (cfg.n - 1) * d.width)


def rk4_increment(cfg: AuctionConfig, dyn: DynamicsConfig, x,
                  d: ValueDistribution):
    """One classical RK4 step of ``dx/dt = eta * payoff_gradient``.

    Returns:
        (dx, stage_offset): the increment of x, and the 1-2-2-1 weighted
        mean of ``x_stage - v_m`` over the four stages.
    """
    h = dyn.h
    eta = dyn.eta

    y1 = x - d.v_m
    k1 = eta * payoff_gradient(cfg, d, x)
    x2 = x + h / 2 * k1
    y2 = x2 - d.v_m
    k2 = eta * payoff_gradient(cfg, d, x2)
    x3 = x + h / 2 * k2
    y3 = x3 - d.v_m
    k3 = eta * payoff_gradient(cfg, d, x3)
    x4 = x + h * k3
    y4 = x4 - d.v_m
    k4 = eta * payoff_gradient(cfg, d, x4)

    dx = h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
    return dx, (y1 + 2 * y2 + 2 * y3 + y4) / 6


def rk4_step(cfg: AuctionConfig, dyn: DynamicsConfig, s: LearnerState,
             d: ValueDistribution):
    """Advance ``s`` by one step of size ``dyn.h`` under distribution ``d``.
    """
    dx, _ = rk4_increment(cfg, dyn, s.x, d)
    if not math.isfinite(s.x + dx):
        raise FloatingPointError('non-finite strategy after step at t=%r'
                                 % s.t)
    return LearnerState(s.x + dx, s.t + dyn.h)
