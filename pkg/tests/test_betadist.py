"""Beta-distribution summaries and the analytic KL divergence."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from beliefbench import (
    BetaParams,
    DomainError,
    NoInteriorModeError,
    beta_kld,
    beta_mean,
    beta_mode,
    beta_sd,
)
from beliefbench.betadist import Interval, beta_pdf, log_beta


def test_beta_params_validation():
    for alpha, beta in [(0.0, 1.0), (1.0, 0.0), (-2.0, 3.0), (math.nan, 1.0), (math.inf, 1.0)]:
        with pytest.raises(DomainError):
            BetaParams(alpha, beta)


def test_beta_params_coerces_to_float():
    d = BetaParams(2, 3)
    assert isinstance(d.alpha, float) and isinstance(d.beta, float)
    assert d == BetaParams(2.0, 3.0)


def test_beta_params_dict_round_trip():
    d = BetaParams(10.79, 18.99)
    assert BetaParams.from_dict(d.to_dict()) == d


def test_interval_validation():
    Interval(0.0, 1.0)
    assert Interval(0.15, 0.25).width == pytest.approx(0.1)
    for lo, hi in [(0.5, 0.5), (0.6, 0.4), (-0.1, 0.5), (0.5, 1.1)]:
        with pytest.raises(DomainError):
            Interval(lo, hi)


def test_mean_sd_mode_examples():
    assert beta_mean(BetaParams(28, 132)) == pytest.approx(0.175, abs=1e-15)
    assert beta_mode(BetaParams(28, 132)) == pytest.approx(27.0 / 158.0, abs=1e-15)
    assert beta_sd(BetaParams(1, 1)) == pytest.approx(math.sqrt(1.0 / 12.0), abs=1e-15)


def test_mode_requires_interior():
    for a, b in [(1.0, 5.0), (5.0, 1.0), (0.5, 0.5)]:
        with pytest.raises(NoInteriorModeError):
            beta_mode(BetaParams(a, b))


def test_moments_match_monte_carlo():
    d = BetaParams(6, 14)
    n = 1_000_000
    draws = np.random.default_rng(2718).beta(d.alpha, d.beta, size=n)
    se_mean = beta_sd(d) / math.sqrt(n)
    assert abs(float(draws.mean()) - beta_mean(d)) <= 3.0 * se_mean
    se_sd = beta_sd(d) / math.sqrt(2.0 * (n - 1))
    assert abs(float(draws.std(ddof=1)) - beta_sd(d)) <= 3.0 * se_sd
    hist, edges = np.histogram(draws, bins=100, range=(0.0, 1.0))
    empirical_mode = (edges[int(hist.argmax())] + edges[int(hist.argmax()) + 1]) / 2.0
    # the density is flat near its peak, so the argmax bin wobbles a little
    assert abs(empirical_mode - beta_mode(d)) <= 0.02


def test_kld_identical_is_exactly_zero():
    d = BetaParams(3, 7)
    assert beta_kld(d, d) == 0.0


def _kld_quadrature(p: BetaParams, q: BetaParams) -> float:
    # log-ratio in closed form: the tail pdf of q underflows to zero long
    # before the integrand stops mattering, so fp / fq is not computable
    log_norm = log_beta(q.alpha, q.beta) - log_beta(p.alpha, p.beta)

    def integrand(x: float) -> float:
        fp = beta_pdf(x, p)
        if fp == 0.0:
            return 0.0
        log_ratio = (
            log_norm
            + (p.alpha - q.alpha) * math.log(x)
            + (p.beta - q.beta) * math.log1p(-x)
        )
        return fp * log_ratio

    value, _ = quad(integrand, 0.0, 1.0, limit=300)
    return value


def test_kld_known_asymmetric_pair():
    forward = beta_kld(BetaParams(2, 2), BetaParams(1, 1))
    backward = beta_kld(BetaParams(1, 1), BetaParams(2, 2))
    assert forward == pytest.approx(0.1251, abs=2e-4)
    assert forward == pytest.approx(_kld_quadrature(BetaParams(2, 2), BetaParams(1, 1)), abs=1e-6)
    assert backward > 0.0
    assert backward != pytest.approx(forward, abs=1e-3)


def test_kld_matches_quadrature_sample():
    rng = np.random.default_rng(31)
    for _ in range(20):
        ap, bp, aq, bq = rng.uniform(0.5, 300.0, size=4)
        p, q = BetaParams(ap, bp), BetaParams(aq, bq)
        assert beta_kld(p, q) == pytest.approx(_kld_quadrature(p, q), abs=1e-6)


def test_kld_nonnegative_over_many_pairs():
    rng = np.random.default_rng(32)
    for _ in range(10_000):
        ap, bp, aq, bq = rng.uniform(0.2, 500.0, size=4)
        p = BetaParams(ap, bp)
        assert beta_kld(p, q := BetaParams(aq, bq)) >= 0.0, (p, q)
        assert beta_kld(p, p) <= 1e-12


def test_kld_grows_with_separation():
    reference = BetaParams(50, 50)
    klds = [beta_kld(BetaParams(50 + shift, 50 - shift), reference) for shift in (0, 5, 10, 20)]
    assert klds[0] == 0.0
    assert all(b > a for a, b in zip(klds, klds[1:]))
