import numpy as np
import pytest

from tvauction import oracle
from tvauction.auction import (AuctionConfig, ValueDistribution,
                               expected_revenue)
from tvauction.learning import (deviant_payoff, equilibrium_payoff,
                                homogeneous_payoff)

CFG = AuctionConfig(10)
D = ValueDistribution(10, 20)
SAMPLES = 200000
Z = 4


def test_clear_auction():
    bids, values = [1.0, 3.0, 2.0], [5.0, 5.0, 5.0]
    assert oracle.clear_auction('FIRST_PRICE', bids, values) == (1, 3.0, 2.0)
    assert oracle.clear_auction(oracle.AuctionKind.SECOND_PRICE, bids,
                                values) == (1, 2.0, 3.0)
    with pytest.raises(ValueError):
        oracle.clear_auction('FIRST_PRICE', [1.0, 2.0], [1.0])
    with pytest.raises(ValueError):
        oracle.clear_auction('FIRST_PRICE', [1.0], [1.0])


def test_ties_broken_at_random():
    rng = np.random.default_rng(1)
    winners = {oracle.clear_auction('SECOND_PRICE', [2.0, 2.0, 1.0],
                                    [3.0, 3.0, 3.0], rng)
               for _ in range(50)}
    # the runner-up bid equals the winning bid on a tie
    assert winners == {(0, 2.0, 1.0), (1, 2.0, 1.0)}


def test_strategy_profile():
    profile = oracle.StrategyProfile('LINEAR_FIRST_PRICE', [10.0, 12.0])
    values = np.array([[15.0, 15.0]])
    bids = profile.bids(AuctionConfig(2), values)
    assert bids.tolist() == [[12.5, 13.5]]
    with pytest.raises(ValueError):
        profile.bids(CFG, values)
    with pytest.raises(ValueError):
        oracle.StrategyProfile('LINEAR_FIRST_PRICE')
    truthful = oracle.StrategyProfile(oracle.StrategyKind.TRUTHFUL)
    assert truthful.bids(CFG, values) is values


def test_too_few_samples():
    with pytest.raises(ValueError):
        oracle.estimate_homogeneous_payoff(CFG, D, 10.0, 9999, 1)


def test_mc_estimate():
    a = oracle.McEstimate(1.0, 0.03, 100)
    b = oracle.McEstimate(1.1, 0.04, 100)
    assert a.combined_se(b) == pytest.approx(0.05)
    assert a.agrees(b, z=3)
    assert not a.agrees(b, z=1)
    assert a.agrees_with(1.05, z=2)


def test_reproducible_and_independent_of_workers():
    a = oracle.estimate_homogeneous_payoff(CFG, D, 11.0, SAMPLES, 5)
    b = oracle.estimate_homogeneous_payoff(CFG, D, 11.0, SAMPLES, 5,
                                           workers=3)
    c = oracle.estimate_homogeneous_payoff(CFG, D, 11.0, SAMPLES, 6)
    assert a == b
    assert a != c
    assert a.n_samples == SAMPLES


@pytest.mark.parametrize('x', [10.0, 12.0, 15.0])
def test_homogeneous_payoff(x):
    estimate = oracle.estimate_homogeneous_payoff(CFG, D, x, SAMPLES, 1)
    assert estimate.agrees_with(homogeneous_payoff(CFG, D, x), z=Z)


@pytest.mark.parametrize('x_dev,x_pop', [(11.0, 10.0), (10.0, 11.0),
                                         (13.0, 12.0), (12.0, 13.0)])
def test_deviant_payoff(x_dev, x_pop):
    estimate = oracle.estimate_deviant_payoff(CFG, D, x_dev, x_pop, SAMPLES,
                                              2)
    assert estimate.agrees_with(deviant_payoff(CFG, D, x_dev, x_pop), z=Z)


@pytest.mark.parametrize('n,support', [(2, (0, 1)), (3, (0, 1)),
                                       (10, (10, 20))])
def test_static_revenue_equivalence(n, support):
    cfg = AuctionConfig(n)
    d = ValueDistribution(*support)
    first, second = oracle.check_static_revenue_equivalence(cfg, d, SAMPLES,
                                                            3)
    assert first.agrees(second, z=Z)
    assert first.agrees_with(expected_revenue(cfg, d), z=Z)
    assert second.agrees_with(expected_revenue(cfg, d), z=Z)


def test_wrong_slope_breaks_equivalence():
    cfg = AuctionConfig(3)
    d = ValueDistribution(0, 1)
    first, second = oracle.check_static_revenue_equivalence(
        cfg, d, SAMPLES, 3, bid_slope=1 / 3)
    assert not first.agrees(second, z=Z)


def test_second_price_payoff():
    truthful = oracle.estimate_payoff(
        CFG, D, oracle.StrategyProfile('TRUTHFUL'), 'SECOND_PRICE', SAMPLES,
        4)
    assert truthful.agrees_with(equilibrium_payoff(CFG, D), z=Z)


def test_truthful_bid_dominates():
    truthful = oracle.estimate_fixed_bid_payoff(CFG, D, None, SAMPLES, 4)
    for bid in (12.0, 17.0, 19.5, 25.0):
        fixed = oracle.estimate_fixed_bid_payoff(CFG, D, bid, SAMPLES, 4)
        # same values for every bid, and truthful bidding is weakly better
        # auction by auction
        assert fixed.mean <= truthful.mean + 1e-12


def test_conditional_payment():
    bins = oracle.estimate_conditional_payment(CFG, D, 'SECOND_PRICE',
                                               SAMPLES, 5, bins=20)
    assert len(bins) == 20
    assert bins['count'].sum() == SAMPLES
    assert bins['lo'].iloc[0] == 10.0 and bins['hi'].iloc[-1] == 20.0
    full = bins[bins['count'] >= 100]
    z = ((full['mean_payment'] - full['mean_expected']).abs()
         / full['std_error'])
    assert (z <= 5).all()

    first = oracle.estimate_conditional_payment(CFG, D, 'FIRST_PRICE',
                                                SAMPLES, 5, bins=20)
    full = first[first['count'] > 0]
    assert np.allclose(full['mean_payment'], full['mean_expected'],
                       rtol=1e-12)


def test_conditional_payment_far_from_origin():
    far = ValueDistribution(1e6, 1e6 + 1)
    bins = oracle.estimate_conditional_payment(CFG, far, 'FIRST_PRICE',
                                               SAMPLES, 2, bins=1)
    # spread of the top order statistic of n uniforms, scaled by alpha
    n = CFG.n
    spread = CFG.alpha * np.sqrt(n / ((n + 1) ** 2 * (n + 2)))
    std = bins['std_error'].iloc[0] * np.sqrt(bins['count'].iloc[0])
    assert std == pytest.approx(spread, rel=0.02)


def test_merge_bins():
    rng = np.random.default_rng(3)
    data = 1e8 + rng.random((3, 500))
    parts = [(np.full(3, 100), chunk.mean(axis=1),
              ((chunk - chunk.mean(axis=1, keepdims=True)) ** 2).sum(axis=1))
             for chunk in np.split(data, 5, axis=1)]
    count, mean, m2 = parts[0]
    for part in parts[1:]:
        count, mean, m2 = oracle._merge_bins((count, mean, m2), part)
    assert count.tolist() == [500] * 3
    assert np.allclose(mean, data.mean(axis=1), rtol=1e-15)
    assert np.allclose(m2 / 500, data.var(axis=1), rtol=1e-6)

    empty = (np.zeros(3, dtype=int), np.zeros(3), np.zeros(3))
    assert np.array_equal(oracle._merge_bins(empty, empty)[1], np.zeros(3))


def test_std_error_scaling():
    sizes = [10 ** 4, 10 ** 5, 10 ** 6]
    errors = [oracle.estimate_homogeneous_payoff(CFG, D, 10.0, m, 1).std_error
              for m in sizes]
    slope = np.polyfit(np.log(sizes), np.log(errors), 1)[0]
    assert slope == pytest.approx(-0.5, abs=0.05)


def test_positive_scaling_keeps_winner():
    rng = np.random.default_rng(4)
    values = [0.0] * 5
    for _ in range(200):
        bids = rng.uniform(10.0, 20.0, 5)
        scale = rng.uniform(0.1, 10.0)
        for kind in oracle.AuctionKind:
            winner, payment, _ = oracle.clear_auction(kind, bids, values)
            scaled, scaled_payment, _ = oracle.clear_auction(
                kind, bids * scale, values)
            assert scaled == winner
            assert scaled_payment == pytest.approx(payment * scale)
