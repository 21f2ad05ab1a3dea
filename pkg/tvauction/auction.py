"""
Static auction mathematics for i.i.d. uniform private values: the value
distribution, equilibrium bidding, and expected payment/payoff formulas.
"""
from collections import namedtuple

from scipy import integrate


class OutOfSupportError(ValueError):
    pass


class ValueDistribution(namedtuple('ValueDistribution', ['v_m', 'v_M'])):
    """Uniform value distribution on ``[v_m, v_M]``."""

    __slots__ = ()

    def __new__(cls, v_m, v_M):
        v_m, v_M = float(v_m), float(v_M)
        if not v_M > v_m:
            raise ValueError('v_M must be greater than v_m, got (%r, %r)'
                             % (v_m, v_M))
        return super().__new__(cls, v_m, v_M)

    @property
    def width(self):
        return self.v_M - self.v_m

    def __contains__(self, v):
        return self.v_m <= v <= self.v_M


class AuctionConfig(namedtuple('AuctionConfig', ['n'])):
    """Number of symmetric bidders; ``alpha`` is the equilibrium slope."""

    __slots__ = ()

    def __new__(cls, n):
        if isinstance(n, bool) or int(n) != n or n < 2:
            raise ValueError('n must be an integer >= 2, got %r' % (n,))
        return super().__new__(cls, int(n))

    @property
    def alpha(self):
        return (self.n - 1) / self.n


def pdf(d: ValueDistribution, v):
    if d.v_m <= v <= d.v_M:
        return 1 / d.width
    return 0.0


def cdf(d: ValueDistribution, v):
    return min(max((v - d.v_m) / d.width, 0.0), 1.0)


def _check_support(d, v):
    if v not in d:
        raise OutOfSupportError('value %r outside support [%r, %r]'
                                % (v, d.v_m, d.v_M))


def expected_payment(cfg: AuctionConfig, d: ValueDistribution, v):
    """Expected payment f(v) of a winner with value ``v``.

    This is also the seller's expected revenue given the winner's value,
    and the equilibrium bid in a first-price auction.

    Raises:
        OutOfSupportError: ``v`` lies outside ``[v_m, v_M]``
    """
    _check_support(d, v)
    return cfg.alpha * (v - d.v_m) + d.v_m


equilibrium_bid = expected_payment


def truthful_bid(v):
    """Dominant strategy in a second-price auction."""
    return v


def expected_winner_payoff(cfg: AuctionConfig, d: ValueDistribution, v):
    """Expected payoff u(v) = v - f(v) of a winner with value ``v``."""
    _check_support(d, v)
    return (v - d.v_m) / cfg.n


def expected_total_payment(cfg: AuctionConfig, d: ValueDistribution, v):
    """Unconditional expected payment G(v) = P(v)^(n-1) f(v)."""
    _check_support(d, v)
    return cdf(d, v) ** (cfg.n - 1) * expected_payment(cfg, d, v)


def expected_revenue(cfg: AuctionConfig, d: ValueDistribution):
    """Seller's expected revenue per auction at equilibrium, equal in
    first-price and second-price formats."""
    return d.v_m + d.width * (cfg.n - 1) / (cfg.n + 1)


def revenue_by_quadrature(cfg: AuctionConfig, d: ValueDistribution):
    """n * integral of G(v) p(v) over the support."""
    value, _ = integrate.quad(
        lambda v: expected_total_payment(cfg, d, v) * pdf(d, v),
        d.v_m, d.v_M, epsabs=0, epsrel=1e-12)
    return cfg.n * value


def equilibrium_payoff_by_quadrature(cfg: AuctionConfig,
                                     d: ValueDistribution):
    """Per-bidder equilibrium payoff E[u(v) P(v)^(n-1)] by quadrature."""
    value, _ = integrate.quad(
        lambda v: (expected_winner_payoff(cfg, d, v)
                   * cdf(d, v) ** (cfg.n - 1) * pdf(d, v)),
        d.v_m, d.v_M, epsabs=0, epsrel=1e-12)
    return value
