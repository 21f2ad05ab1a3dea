import pytest

from tvauction.auction import (AuctionConfig, OutOfSupportError,
                               ValueDistribution, cdf, equilibrium_bid,
                               equilibrium_payoff_by_quadrature,
                               expected_payment, expected_revenue,
                               expected_total_payment, expected_winner_payoff,
                               pdf, revenue_by_quadrature, truthful_bid)
from tvauction.learning import equilibrium_payoff


def test_value_distribution():
    d = ValueDistribution(10, 20)
    assert d.width == 10.0
    assert 10.0 in d and 20.0 in d and 21.0 not in d
    with pytest.raises(ValueError):
        ValueDistribution(20, 20)
    with pytest.raises(ValueError):
        ValueDistribution(20, 10)


def test_auction_config():
    assert AuctionConfig(10).alpha == 0.9
    for bad in (1, 0, 2.5, True):
        with pytest.raises(ValueError):
            AuctionConfig(bad)


def test_expected_payment():
    cfg = AuctionConfig(10)
    d = ValueDistribution(10, 20)
    assert expected_payment(cfg, d, 10.0) == 10.0
    assert expected_payment(cfg, d, 20.0) == pytest.approx(19.0)
    assert equilibrium_bid(cfg, d, 15.0) == expected_payment(cfg, d, 15.0)
    assert truthful_bid(15.0) == 15.0
    for v in (10.0, 12.5, 17.0, 20.0):
        assert (expected_payment(cfg, d, v)
                + expected_winner_payoff(cfg, d, v)) == pytest.approx(v)
    with pytest.raises(OutOfSupportError):
        expected_payment(cfg, d, 9.99)
    with pytest.raises(OutOfSupportError):
        expected_winner_payoff(cfg, d, 20.01)


def test_total_payment():
    cfg = AuctionConfig(3)
    d = ValueDistribution(0, 1)
    assert expected_total_payment(cfg, d, 0.0) == 0.0
    assert expected_total_payment(cfg, d, 1.0) == pytest.approx(2 / 3)
    assert cdf(d, -1.0) == 0.0 and cdf(d, 2.0) == 1.0


@pytest.mark.parametrize('n,support', [(2, (0, 1)), (3, (0, 1)),
                                       (10, (10, 20)), (10, (20, 40))])
def test_revenue_and_payoff_quadrature(n, support):
    cfg = AuctionConfig(n)
    d = ValueDistribution(*support)
    assert revenue_by_quadrature(cfg, d) == \
        pytest.approx(expected_revenue(cfg, d), rel=1e-10)
    w_star = equilibrium_payoff_by_quadrature(cfg, d)
    assert w_star == pytest.approx(equilibrium_payoff(cfg, d), rel=1e-10)
    # winner surplus
    assert n * w_star == pytest.approx(d.width / (n + 1), rel=1e-10)


def test_two_bidder_revenue():
    assert expected_revenue(AuctionConfig(2), ValueDistribution(0, 1)) == \
        pytest.approx(1 / 3)


def test_midpoint_values():
    cfg = AuctionConfig(10)
    d = ValueDistribution(10, 20)
    assert pdf(d, 15.0) == 0.1
    assert pdf(d, 25.0) == 0.0
    assert cdf(d, 15.0) == 0.5
    assert expected_payment(cfg, d, 15.0) == pytest.approx(14.5)
    assert expected_total_payment(cfg, d, 15.0) == \
        pytest.approx(0.5 ** 9 * 14.5, rel=1e-12)
