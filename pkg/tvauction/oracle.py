"""
Monte-Carlo auction oracle.

Draws private values, forms bids, clears first-price or second-price
auctions and estimates payoffs and revenues, independently of the closed
forms in :mod:`tvauction.auction` and :mod:`tvauction.learning`.

Auctions are simulated in blocks of ``BLOCK`` rows; block ``i`` draws from
the ``i``-th child of ``SeedSequence(seed)``, and block moments are merged
in block order, so an estimate depends only on ``(seed, samples)``.
"""
import enum
import math
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pandas as pd

from .auction import AuctionConfig, ValueDistribution

BLOCK = 1 << 16
MIN_SAMPLES = 10 ** 4


class AuctionKind(enum.Enum):
    FIRST_PRICE = 'FIRST_PRICE'
    SECOND_PRICE = 'SECOND_PRICE'


class StrategyKind(enum.Enum):
    LINEAR_FIRST_PRICE = 'LINEAR_FIRST_PRICE'
    TRUTHFUL = 'TRUTHFUL'


class StrategyProfile(namedtuple('StrategyProfile',
                                 ['kind', 'x_values', 'slope'])):
    """Bidding strategies of all n bidders.

    ``LINEAR_FIRST_PRICE`` bids ``slope * (v - x_i) + x_i`` with one
    intercept per bidder (``slope`` defaults to alpha); ``TRUTHFUL`` bids
    ``v``.
    """

    __slots__ = ()

    def __new__(cls, kind, x_values=None, slope=None):
        kind = StrategyKind(kind)
        if kind is StrategyKind.LINEAR_FIRST_PRICE:
            if x_values is None:
                raise ValueError('x_values required for linear strategies')
            x_values = tuple(float(x) for x in x_values)
        return super().__new__(cls, kind, x_values, slope)

    def bids(self, cfg: AuctionConfig, values):
        if self.kind is StrategyKind.TRUTHFUL:
            return values
        if len(self.x_values) != cfg.n:
            raise ValueError('expected %d intercepts, got %d'
                             % (cfg.n, len(self.x_values)))
        slope = cfg.alpha if self.slope is None else self.slope
        x = np.asarray(self.x_values)
        return slope * (values - x) + x


class McEstimate(namedtuple('McEstimate',
                            ['mean', 'std_error', 'n_samples'])):
    """Sample mean with its standard error ``std / sqrt(n_samples)``."""

    __slots__ = ()

    def combined_se(self, other):
        return math.hypot(self.std_error, other.std_error)

    def agrees_with(self, value, z=3.0):
        """Whether a reference value lies within ``z`` standard errors."""
        return abs(self.mean - value) <= z * self.std_error

    def agrees(self, other, z=3.0):
        """Whether two independent estimates agree within ``z`` combined
        standard errors."""
        return abs(self.mean - other.mean) <= z * self.combined_se(other)


class _Moments:
    """Running count, mean and sum of squared deviations."""

    def __init__(self, count=0, mean=0.0, m2=0.0):
        self.count = count
        self.mean = mean
        self.m2 = m2

    @classmethod
    def of(cls, samples):
        mean = float(np.mean(samples))
        return cls(len(samples), mean, float(np.sum((samples - mean) ** 2)))

    def merge(self, other):
        if not other.count:
            return
        total = self.count + other.count
        delta = other.mean - self.mean
        self.mean += delta * other.count / total
        self.m2 += other.m2 + delta ** 2 * self.count * other.count / total
        self.count = total

    def estimate(self):
        std = math.sqrt(self.m2 / (self.count - 1)) if self.count > 1 else 0.0
        return McEstimate(self.mean, std / math.sqrt(self.count), self.count)


def _seed_sequence(seed):
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def _check_samples(samples):
    if samples < MIN_SAMPLES:
        raise ValueError('at least %d samples required, got %d'
                         % (MIN_SAMPLES, samples))


def _blocks(samples, seed):
    children = _seed_sequence(seed).spawn(-(-samples // BLOCK))
    sizes = [BLOCK] * (samples // BLOCK)
    if samples % BLOCK:
        sizes.append(samples % BLOCK)
    return [(np.random.default_rng(c), m) for c, m in zip(children, sizes)]


def _map_blocks(fn, samples, seed, workers):
    blocks = _blocks(samples, seed)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda b: fn(*b), blocks))
    return [fn(*b) for b in blocks]


def _estimate(fn, samples, seed, workers=None):
    """Mean of the per-auction quantity ``fn(rng, m)`` over ``samples``
    auctions."""
    _check_samples(samples)
    moments = _Moments()
    for block in _map_blocks(fn, samples, seed, workers):
        moments.merge(_Moments.of(block))
    return moments.estimate()


def _winners(bids, rng):
    """Row-wise argmax of ``bids`` with ties broken uniformly at random."""
    tied = bids == bids.max(axis=1, keepdims=True)
    if not (tied.sum(axis=1) > 1).any():
        return bids.argmax(axis=1)
    keys = np.where(tied, rng.random(bids.shape), -1.0)
    return keys.argmax(axis=1)


def _clear(kind, bids, rng):
    winners = _winners(bids, rng)
    if kind is AuctionKind.FIRST_PRICE:
        payments = bids[np.arange(len(bids)), winners]
    else:
        # highest bid among the others; equals the top bid on a tie
        payments = np.partition(bids, -2, axis=1)[:, -2]
    return winners, payments


def clear_auction(kind, bids, values, rng=None):
    """Clear one sealed-bid auction.

    Returns:
        (winner, payment, winner_payoff); every other bidder's payoff is 0

    Raises:
        ValueError: ``bids`` and ``values`` differ in length or hold fewer
            than two bidders
    """
    kind = AuctionKind(kind)
    if len(bids) != len(values):
        raise ValueError('got %d bids for %d values'
                         % (len(bids), len(values)))
    if len(bids) < 2:
        raise ValueError('at least two bidders required')
    if rng is None:
        rng = np.random.default_rng()
    winners, payments = _clear(kind, np.asarray(bids, dtype=float)[None, :],
                               rng)
    winner = int(winners[0])
    payment = float(payments[0])
    return winner, payment, float(values[winner]) - payment


def _draw(cfg, d, rng, m):
    return rng.uniform(d.v_m, d.v_M, size=(m, cfg.n))


def estimate_payoff(cfg: AuctionConfig, d: ValueDistribution,
                    profile: StrategyProfile, kind, samples, seed,
                    bidder=0, workers=None):
    """Expected payoff of one bidder under a strategy profile."""
    kind = AuctionKind(kind)

    def block(rng, m):
        values = _draw(cfg, d, rng, m)
        winners, payments = _clear(kind, profile.bids(cfg, values), rng)
        return np.where(winners == bidder, values[:, bidder] - payments, 0.0)

    return _estimate(block, samples, seed, workers)


def estimate_homogeneous_payoff(cfg: AuctionConfig, d: ValueDistribution, x,
                                samples, seed, workers=None):
    """Per-bidder first-price payoff when everybody uses intercept ``x``,
    counted as the winner's payoff divided by n."""
    profile = StrategyProfile(StrategyKind.LINEAR_FIRST_PRICE, [x] * cfg.n)

    def block(rng, m):
        values = _draw(cfg, d, rng, m)
        bids = profile.bids(cfg, values)
        winners, payments = _clear(AuctionKind.FIRST_PRICE, bids, rng)
        won = values[np.arange(m), winners]
        return (won - payments) / cfg.n

    return _estimate(block, samples, seed, workers)


def estimate_deviant_payoff(cfg: AuctionConfig, d: ValueDistribution,
                            x_dev, x_pop, samples, seed, workers=None):
    """First-price payoff of bidder 0 using ``x_dev`` against n-1 bidders
    using ``x_pop``."""
    profile = StrategyProfile(StrategyKind.LINEAR_FIRST_PRICE,
                              [x_dev] + [x_pop] * (cfg.n - 1))
    return estimate_payoff(cfg, d, profile, AuctionKind.FIRST_PRICE, samples,
                           seed, workers=workers)


def estimate_revenue(cfg: AuctionConfig, d: ValueDistribution,
                     profile: StrategyProfile, kind, samples, seed,
                     workers=None):
    """Seller revenue per auction."""
    kind = AuctionKind(kind)

    def block(rng, m):
        values = _draw(cfg, d, rng, m)
        _, payments = _clear(kind, profile.bids(cfg, values), rng)
        return payments

    return _estimate(block, samples, seed, workers)


def check_static_revenue_equivalence(cfg: AuctionConfig,
                                     d: ValueDistribution, samples, seed,
                                     bid_slope=None, workers=None):
    """Revenue of a first-price auction under equilibrium bidding and of a
    second-price auction under truthful bidding, on independent streams.

    Args:
        bid_slope (float): overrides the first-price bidding slope

    Returns:
        (first, second): McEstimate of the revenue per auction
    """
    first_seed, second_seed = _seed_sequence(seed).spawn(2)
    equilibrium = StrategyProfile(StrategyKind.LINEAR_FIRST_PRICE,
                                  [d.v_m] * cfg.n, slope=bid_slope)
    first = estimate_revenue(cfg, d, equilibrium, AuctionKind.FIRST_PRICE,
                             samples, first_seed, workers)
    second = estimate_revenue(cfg, d, StrategyProfile(StrategyKind.TRUTHFUL),
                              AuctionKind.SECOND_PRICE, samples, second_seed,
                              workers)
    return first, second


def estimate_fixed_bid_payoff(cfg: AuctionConfig, d: ValueDistribution, bid,
                              samples, seed, workers=None):
    """Second-price payoff of bidder 0 bidding the constant ``bid`` (or
    truthfully when ``bid`` is None) against truthful opponents.

    Values are drawn identically for every ``bid`` under the same seed.
    """

    def block(rng, m):
        values = _draw(cfg, d, rng, m)
        bids = values.copy()
        if bid is not None:
            bids[:, 0] = bid
        winners, payments = _clear(AuctionKind.SECOND_PRICE, bids, rng)
        return np.where(winners == 0, values[:, 0] - payments, 0.0)

    return _estimate(block, samples, seed, workers)


def estimate_conditional_payment(cfg: AuctionConfig, d: ValueDistribution,
                                 kind, samples, seed, bins=100,
                                 workers=None):
    """Mean payment of the winner binned by the winner's value.

    First-price auctions use equilibrium bids, second-price auctions
    truthful bids.

    Returns:
        pandas.DataFrame: one row per bin with ``lo``, ``hi``, ``count``,
        ``mean_payment``, ``std_error`` and ``mean_expected`` (mean of f(v)
        over the same winners)
    """
    kind = AuctionKind(kind)
    _check_samples(samples)
    if kind is AuctionKind.FIRST_PRICE:
        profile = StrategyProfile(StrategyKind.LINEAR_FIRST_PRICE,
                                  [d.v_m] * cfg.n)
    else:
        profile = StrategyProfile(StrategyKind.TRUTHFUL)
    edges = np.linspace(d.v_m, d.v_M, bins + 1)

    def block(rng, m):
        values = _draw(cfg, d, rng, m)
        winners, payments = _clear(kind, profile.bids(cfg, values), rng)
        won = values[np.arange(m), winners]
        index = np.clip(np.searchsorted(edges, won, side='right') - 1,
                        0, bins - 1)
        count = np.bincount(index, minlength=bins)
        mean = np.bincount(index, payments, minlength=bins) / \
            np.maximum(count, 1)
        m2 = np.bincount(index, (payments - mean[index]) ** 2,
                         minlength=bins)
        expected = np.bincount(index, cfg.alpha * (won - d.v_m) + d.v_m,
                               minlength=bins)
        return count, mean, m2, expected

    blocks = _map_blocks(block, samples, seed, workers)
    count, mean, m2, total_expected = blocks[0]
    for other in blocks[1:]:
        count, mean, m2 = _merge_bins((count, mean, m2), other[:3])
        total_expected = total_expected + other[3]
    safe = np.maximum(count, 2)
    return pd.DataFrame({
        'lo': edges[:-1],
        'hi': edges[1:],
        'count': count.astype(int),
        'mean_payment': mean,
        'std_error': np.sqrt(m2 / (safe - 1) / safe),
        'mean_expected': total_expected / np.maximum(count, 1),
    })


def _merge_bins(a, b):
    """Elementwise version of :meth:`_Moments.merge` for binned moments."""
    count_a, mean_a, m2_a = a
    count_b, mean_b, m2_b = b
    total = count_a + count_b
    safe = np.maximum(total, 1)
    delta = mean_b - mean_a
    mean = mean_a + delta * count_b / safe
    m2 = m2_a + m2_b + delta ** 2 * count_a * count_b / safe
    return total, mean, m2
