import math

import numpy as np
import pytest

from ftrfading.ftr import ftr_cdf, ftr_moment
from ftrfading.mc import (
    BLOCK,
    McConfig,
    derive_amplitudes,
    draw_snr,
    empirical_cdf,
    mc_expectation,
    mc_outage_a,
    mc_outage_b,
    sample_snr,
)
from ftrfading.models import FtrParams
from ftrfading.outage import ScenarioA, ScenarioB, outage_a, outage_b
from ftrfading.specfun import DomainError

P = FtrParams


def within(est, p, n, k=3.0):
    return abs(est - p) <= k * math.sqrt(p * (1 - p) / n) + 1e-15


def test_config_validation():
    for kw in (dict(samples=0), dict(samples=5, seed=-1), dict(samples=5, seed=2**64), dict(samples=5, batch=0)):
        with pytest.raises(ValueError):
            McConfig(**kw)


def test_amplitude_limits():
    a = derive_amplitudes(P(2.0, 1.0, 4.0, 0.0))
    assert a.v2 == 0.0 and a.v1 == pytest.approx(math.sqrt(2 * a.sigma2 * 4.0))
    b = derive_amplitudes(P(2.0, 1.0, 4.0, 1.0))
    assert b.v1 == pytest.approx(b.v2) and b.v1 == pytest.approx(math.sqrt(2 * b.sigma2 * 4.0 / 2))
    c = derive_amplitudes(P(2.0, 1.0, 0.0, 0.6))
    assert c.v1 == 0.0 and c.v2 == 0.0 and c.sigma2 == pytest.approx(1.0)


@pytest.mark.parametrize("k", [0.3, 4.0, 25.0])
@pytest.mark.parametrize("d", [0.0, 0.37, 0.9, 1.0])
def test_amplitudes_round_trip(k, d):
    a = derive_amplitudes(P(1.7, 2.0, k, d))
    assert a.k == pytest.approx(k, rel=1e-12)
    assert a.delta == pytest.approx(d, abs=1e-12)
    assert a.sigma2 * 2 * (1 + k) == pytest.approx(1.7, rel=1e-14)


def test_reproducible_across_batch_and_workers():
    p = P(1.0, 1.5, 10.0, 0.5)
    base = mc_expectation(p, lambda g: g, McConfig(300_000, 11))
    for batch, workers in ((1, 1), (BLOCK, 3), (5 * BLOCK, 2), (10**9, 1)):
        assert mc_expectation(p, lambda g: g, McConfig(300_000, 11, batch, workers)) == base
    other = mc_expectation(p, lambda g: g, McConfig(300_000, 12))
    assert other != base


def test_sample_stream_blocks():
    p = P(1.0, 2.0, 3.0, 0.3)
    blocks = list(sample_snr(p, McConfig(BLOCK + 10, 5)))
    assert [b.size for b in blocks] == [BLOCK, 10]
    again = list(sample_snr(p, McConfig(BLOCK + 10, 5)))
    assert all(np.array_equal(a, b) for a, b in zip(blocks, again))
    assert np.all(np.concatenate(blocks) >= 0)


def test_mean_matches_first_moment():
    p = P(2.0, 1.5, 10.0, 0.5)
    est, se = mc_expectation(p, lambda g: g, McConfig(1_000_000, 3))
    assert abs(est - ftr_moment(1, p)) <= 4 * se


def test_k_zero_is_exponential():
    p = P(1.0, 1.3, 0.0, 0.5)
    snr = np.concatenate(list(sample_snr(p, McConfig(1_000_000, 4))))
    grid = np.linspace(0.0, 6.0, 121)
    assert np.max(np.abs(empirical_cdf(snr, grid) - (1 - np.exp(-grid)))) < 0.002


def test_large_m_approaches_rician():
    # m -> infinity, delta = 0: Rician K; compare with the closed form through the
    # Marcum-Q-free series 1 - sum_j e^-K K^j / j! * Q(j+1, (1+K) x / gamma_bar)
    k, g = 5.0, 1.0
    p = P(g, 500.0, k, 0.0)
    snr = np.concatenate(list(sample_snr(p, McConfig(400_000, 9))))
    grid = np.linspace(0.05, 4.0, 40)
    u = (1 + k) * grid / g
    ref = np.zeros_like(grid)
    pois = math.exp(-k)
    for j in range(80):
        term = np.ones_like(u)
        acc = np.ones_like(u)
        for r in range(1, j + 1):
            term = term * u / r
            acc = acc + term
        ref += pois * (1 - np.exp(-u) * acc)
        pois *= k / (j + 1)
    assert np.max(np.abs(empirical_cdf(snr, grid) - ref)) < 0.005


def test_ecdf_matches_ftr_cdf():
    p = P(1.0, 3.0, 10.0, 0.5)
    snr = np.concatenate(list(sample_snr(p, McConfig(200_000, 21))))
    grid = np.linspace(0.05, 4.0, 30)
    assert np.max(np.abs(empirical_cdf(snr, grid) - ftr_cdf(grid, p))) < 2 * 1.36 / math.sqrt(snr.size)


def test_empirical_cdf_examples():
    assert np.all(empirical_cdf(np.array([0.1, 0.2]), [1.0, 2.0]) == 1.0)
    assert list(empirical_cdf(np.array([2.0]), [1.0, 2.0, 3.0])) == [0.0, 1.0, 1.0]
    rng = np.random.default_rng(0)
    x = rng.exponential(size=1_000_000)
    grid = np.linspace(0, 5, 51)
    assert np.max(np.abs(empirical_cdf(x, grid) - (1 - np.exp(-grid)))) < 0.002
    assert np.all(np.diff(empirical_cdf(x, grid)) >= 0)
    with pytest.raises(DomainError):
        empirical_cdf(np.array([]), [1.0])
    with pytest.raises(DomainError):
        empirical_cdf(iter([]), [1.0])


def test_mc_outage_a_zero_threshold():
    sc = ScenarioA(P(1.0, 2, 10.0, 0.6), 2, 0.01, 0.98, 1e-300)
    assert mc_outage_a(sc, McConfig(10_000, 1)) == (0.0, 0.0)


def test_mc_outage_a_noise_limited():
    ch = P(1.0, 2, 10.0, 0.6)
    sc = ScenarioA(ch, 1, 1e-9, 0.98, 1.0)
    est, _ = mc_outage_a(sc, McConfig(500_000, 2))
    assert within(est, ftr_cdf(0.98, ch), 500_000)


def test_mc_outage_a_figure_point():
    sc = ScenarioA(P(10.0, 2, 10.0, 0.6), 2, 0.01, 0.98, 1.0)
    est, _ = mc_outage_a(sc, McConfig(500_000, 3))
    assert within(est, outage_a(sc), 500_000)


def test_mc_outage_b():
    sc = ScenarioB(P(3.0, 1.5, 10.0, 0.6), 1, 1, 1.0, 1.0)
    est, se = mc_outage_b(sc, McConfig(500_000, 4))
    assert within(est, outage_b(sc), 500_000)
    assert se == pytest.approx(math.sqrt(est * (1 - est) / 500_000))


def test_more_antennas_lower_outage():
    ch = P(10.0, 1.0, 10.0, 0.6)
    cfg = McConfig(1_000_000, 6)
    one, _ = mc_outage_b(ScenarioB(ch, 1, 1, 1.0, 1.0), cfg)
    two, _ = mc_outage_b(ScenarioB(ch, 2, 1, 1.0, 1.0), cfg)
    assert two < one


def test_draw_snr_uses_given_rng():
    p = P(1.0, 0.7, 2.0, 0.2)
    a = draw_snr(p, np.random.default_rng(3), 100)
    b = draw_snr(p, np.random.default_rng(3), 100)
    assert np.array_equal(a, b)
