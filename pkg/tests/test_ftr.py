import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ftrfading.ftr import (
    NAKAGAMI,
    RICIAN_SHADOWED,
    LiftedMetric,
    ftr_cdf,
    ftr_gmgf,
    ftr_igmgf,
    ftr_imgf_lower,
    ftr_imgf_upper,
    ftr_mgf,
    ftr_mgf_theta,
    ftr_moment,
    ftr_pdf,
    ftr_pdf_integer,
    lift_nakagami_metric,
    lift_rs_metric,
    tail_rate,
)
from ftrfading.models import FtrParams, NakagamiParams, RsParams, nakagami_ccdf, nakagami_pdf, rs_mgf, rs_pdf
from ftrfading.quad import integrate_semi_infinite
from ftrfading.specfun import DomainError

P = FtrParams


def tail(f, lower, p, s=0.0):
    return integrate_semi_infinite(f, lower, rate=0.5 * (tail_rate(p) - s))


# ---------------------------------------------------------------- density


def test_pdf_delta_zero_is_rs():
    p = P(1.5, 2.3, 7.0, 0.0)
    x = np.linspace(0, 5, 21)
    assert np.allclose(ftr_pdf(x, p), rs_pdf(x, RsParams(1.5, 2.3, 7.0)), rtol=1e-13)


def test_pdf_k_zero_is_exponential():
    p = P(2.0, 1.7, 0.0, 0.8)
    x = np.linspace(0, 8, 17)
    assert np.allclose(ftr_pdf(x, p), np.exp(-x / 2) / 2, rtol=1e-13)


def test_pdf_scalar_and_array_agree():
    p = P(1.0, 1.5, 10.0, 0.5)
    x = np.array([0.0, 0.3, 2.0])
    assert np.allclose(ftr_pdf(x, p), [ftr_pdf(float(v), p) for v in x], rtol=1e-13)
    assert isinstance(ftr_pdf(0.3, p), float)


def test_pdf_against_mpmath_theta_integral():
    p = P(1.0, 1.5, 10.0, 0.5)
    mp.mp.dps = 25

    def ref(x):
        def f(t):
            kt = p.k * (1 + p.delta * mp.cos(t))
            g = p.gamma_bar / (1 + p.k) * (1 + kt)
            m = p.m
            return (m / (m + kt)) ** m * (1 + kt) / g * mp.exp(-(1 + kt) * x / g) * mp.hyp1f1(m, 1, kt * (1 + kt) * x / (g * (m + kt)))

        return mp.quad(f, [0, mp.pi]) / mp.pi

    for x in (0.05, 0.8, 3.0):
        assert ftr_pdf(x, p) == pytest.approx(float(ref(x)), rel=1e-10)


@pytest.mark.parametrize("p", [P(1.0, 1.5, 10, 0.5), P(2.0, 0.6, 25, 1.0), P(0.5, 4.0, 3, 0.9)])
def test_pdf_normalized_and_nonnegative(p):
    x = np.linspace(0, 10 * p.gamma_bar, 200)
    assert np.all(ftr_pdf(x, p) >= 0)
    assert tail(lambda t: ftr_pdf(t, p), 0.0, p) == pytest.approx(1.0, abs=1e-9)


def test_pdf_integer_examples():
    p1 = P(1.3, 1, 6.0, 0.7)
    x = np.linspace(0, 5, 30)
    assert np.allclose(ftr_pdf_integer(x, p1), ftr_pdf(x, p1), rtol=1e-10, atol=1e-14)
    p3 = P(1.0, 3, 10.0, 0.0)
    assert np.allclose(ftr_pdf_integer(x, p3), rs_pdf(x, RsParams(1.0, 3, 10.0)), rtol=1e-10, atol=1e-14)
    with pytest.raises(DomainError):
        ftr_pdf_integer(1.0, P(1, 2.5, 3, 0.2))


@pytest.mark.parametrize("m", [1, 2, 3, 5])
def test_rs_and_nakagami_paths_agree(m):
    p = P(1.0, m, 10.0, 0.5)
    x = np.linspace(0.0, 5.0, 50)
    a, b = ftr_pdf(x, p), ftr_pdf_integer(x, p)
    assert np.all(np.abs(a - b) <= 1e-9 * np.maximum(np.abs(b), 1e-300) + 1e-15)


# ---------------------------------------------------------------- CDF


def test_cdf_examples():
    p = P(1.0, 1.5, 10.0, 0.5)
    assert ftr_cdf(0.0, p) == 0.0
    assert ftr_cdf(50.0, p) == pytest.approx(1.0, abs=1e-6)
    p2 = P(1.0, 2.0, 5.0, 0.9)
    assert ftr_cdf(1.0, p2) == pytest.approx(ftr_cdf(1.0, p2, path="phi2"), abs=1e-6)


@pytest.mark.parametrize("p", [P(1.0, 0.7, 4.0, 0.3), P(2.0, 3.0, 12.0, 1.0), P(1.0, 1.0, 0.0, 0.5)])
def test_cdf_paths_agree_in_region(p):
    for x in (0.1, 0.6 * p.gamma_bar, 2.0 * p.gamma_bar):
        assert ftr_cdf(x, p) == pytest.approx(ftr_cdf(x, p, path="phi2"), abs=1e-9)


def test_cdf_k_zero_closed_form():
    p = P(2.0, 1.3, 0.0, 0.0)
    x = np.array([0.2, 1.0, 3.0, 9.0])
    assert np.allclose(ftr_cdf(x, p), 1 - np.exp(-x / 2), atol=1e-12)


def test_cdf_monotone_on_grid():
    p = P(1.0, 1.5, 10.0, 0.5)
    c = ftr_cdf(np.linspace(0, 6, 40), p)
    assert np.all(np.diff(c) >= 0)


def test_cdf_decreases_with_m_in_deep_fade():
    x = 0.3
    vals = [ftr_cdf(x, P(1.0, m, 8.0, 0.6)) for m in (0.5, 1.0, 2.0, 4.0, 8.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_cdf_validation():
    p = P(1.0, 2.0, 3.0, 0.2)
    with pytest.raises(ValueError):
        ftr_cdf(1.0, p, path="series")
    with pytest.raises(DomainError):
        ftr_cdf(-1.0, p)


# ---------------------------------------------------------------- MGF family


def test_mgf_examples():
    p = P(2.0, 2.5, 8.0, 0.7)
    assert ftr_mgf(0.0, p) == pytest.approx(1.0, rel=1e-15)
    # m = 1: the Legendre factor is 1 and R^(m/2) = sqrt(R)
    q = P(2.0, 1.0, 8.0, 0.7)
    s = -1.3
    a = (1 + q.k) - (1 + q.k) * q.gamma_bar * s
    r = a * a - (q.k * q.delta * q.gamma_bar * s) ** 2
    assert ftr_mgf(s, q) == pytest.approx((1 + q.k) / math.sqrt(r), rel=1e-14)
    assert ftr_mgf(-1.0, p) == pytest.approx(ftr_mgf_theta(-1.0, p), rel=1e-10)
    with pytest.raises(DomainError):
        ftr_mgf(0.5, p)


@settings(max_examples=40, deadline=None)
@given(
    m=st.floats(0.3, 12.0),
    k=st.floats(0.0, 40.0),
    d=st.floats(0.0, 1.0),
    s=st.floats(-50.0, 0.0),
    g=st.floats(0.1, 10.0),
)
def test_mgf_closed_form_equals_theta_integral(m, k, d, s, g):
    p = P(g, m, k, d)
    assert ftr_mgf(s, p) == pytest.approx(ftr_mgf_theta(s, p), rel=1e-10)


def test_mgf_against_definition_integral():
    p = P(1.0, 0.8, 5.0, 0.95)
    s = -0.6
    oracle = tail(lambda t: np.exp(s * t) * ftr_pdf(t, p), 0.0, p, s)
    assert ftr_mgf(s, p) == pytest.approx(oracle, rel=1e-9)


def test_gmgf_examples():
    p = P(1.0, 1.7, 6.0, 0.3)
    for s in (0.0, -0.3, -4.0):
        assert ftr_gmgf(0, s, p) == pytest.approx(ftr_mgf(s, p), rel=1e-9)
    assert ftr_gmgf(1, 0.0, P(2.5, 1.7, 6.0, 0.3)) == pytest.approx(2.5, rel=1e-12)
    oracle = tail(lambda t: t**2 * np.exp(-0.4 * t) * ftr_pdf(t, p), 0.0, p, -0.4)
    assert ftr_gmgf(2, -0.4, p) == pytest.approx(oracle, rel=1e-7)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("p", [P(1.0, 0.7, 15.0, 1.0), P(3.0, 2.5, 3.0, 0.5), P(1.0, 4.0, 0.0, 0.0)])
def test_gmgf_against_definition_integral(n, p):
    s = -0.7
    oracle = tail(lambda t: t**n * np.exp(s * t) * ftr_pdf(t, p), 0.0, p, s)
    assert ftr_gmgf(n, s, p) == pytest.approx(oracle, rel=1e-8)


def test_gmgf_validation():
    p = P(1.0, 2.0, 3.0, 0.2)
    with pytest.raises(DomainError):
        ftr_gmgf(-1, -0.1, p)
    with pytest.raises(DomainError):
        ftr_gmgf(1.5, -0.1, p)
    with pytest.raises(DomainError):
        ftr_gmgf(1, 0.2, p)


def test_moments():
    assert ftr_moment(0, P(2.0, 1.3, 4.0, 0.8)) == pytest.approx(1.0, rel=1e-14)
    p = P(1.0, 2.0, 4.0, 1.0)
    oracle = tail(lambda t: t**2 * ftr_pdf(t, p), 0.0, p)
    assert ftr_moment(2, p) == pytest.approx(oracle, rel=1e-8)


@settings(max_examples=30, deadline=None)
@given(g=st.floats(0.01, 100.0), m=st.floats(0.2, 20.0), k=st.floats(0.0, 50.0), d=st.floats(0.0, 1.0))
def test_first_moment_is_mean(g, m, k, d):
    assert ftr_moment(1, P(g, m, k, d)) == pytest.approx(g, rel=1e-9)


def test_second_moment_closed_form():
    # E[gamma^2] from the physical model: with S = V1^2 + V2^2 and
    # c = 2 V1 V2, E|V|^4 = S^2 (1 + 1/m) + c^2 (1 + 1/m)/2 + 4 S (2 sigma^2) + 2 (2 sigma^2)^2
    g, m, k, d = 1.7, 2.3, 6.0, 0.45
    two_s2 = g / (1 + k)
    spec = k * two_s2
    c = d * spec
    expected = (1 + 1 / m) * (spec**2 + c * c / 2) + 4 * spec * two_s2 + 2 * two_s2**2
    assert ftr_moment(2, P(g, m, k, d)) == pytest.approx(expected, rel=1e-11)


# ---------------------------------------------------------------- incomplete MGFs


def test_imgf_lower_examples():
    p = P(1.0, 2.2, 3.0, 0.4)
    assert ftr_imgf_lower(-0.5, 0.0, p) == 0.0
    assert ftr_imgf_lower(0.0, 1.3, p) == pytest.approx(ftr_cdf(1.3, p), abs=1e-8)
    assert ftr_imgf_lower(-0.5, 50.0, p) == pytest.approx(ftr_mgf(-0.5, p), abs=1e-6)


def test_imgf_paths_agree():
    p = P(1.0, 2.2, 3.0, 0.4)
    for s, z in ((-0.2, 1.5), (-3.0, 0.4), (-0.01, 4.0)):
        assert ftr_imgf_lower(s, z, p, path="phi2") == pytest.approx(ftr_imgf_lower(s, z, p), abs=1e-9)


def test_imgf_upper_examples():
    p = P(1.0, 2.2, 3.0, 0.4)
    assert ftr_imgf_upper(-0.3, 0.0, p) == pytest.approx(ftr_mgf(-0.3, p), rel=1e-15)
    for s, z in ((-0.2, 1.5), (-2.0, 0.3), (0.0, 3.0)):
        total = ftr_imgf_lower(s, z, p) + ftr_imgf_upper(s, z, p)
        assert abs(total - ftr_mgf(s, p)) <= 1e-12
    oracle = tail(lambda t: np.exp(-0.2 * t) * ftr_pdf(t, p), 1.5, p, -0.2)
    assert ftr_imgf_upper(-0.2, 1.5, p) == pytest.approx(oracle, rel=1e-7)


def test_igmgf_examples():
    p = P(1.0, 3, 10.0, 0.5)
    assert ftr_igmgf(0, -0.8, 0.0, p) == pytest.approx(ftr_mgf(-0.8, p), rel=1e-9)
    assert ftr_igmgf(0, 0.0, 1.1, p) == pytest.approx(1 - ftr_cdf(1.1, p), abs=1e-8)
    q = P(1.0, 2, 10.0, 0.6)
    oracle = tail(lambda t: t * np.exp(-0.3 * t) * ftr_pdf(t, q), 0.8, q, -0.3)
    assert ftr_igmgf(1, -0.3, 0.8, q) == pytest.approx(oracle, rel=1e-7)
    with pytest.raises(DomainError):
        ftr_igmgf(1, -0.3, 0.8, P(1.0, 2.5, 10.0, 0.6))


def test_igmgf_zero_lambda_is_gmgf():
    p = P(1.5, 2, 7.0, 0.9)
    for n in (1, 2, 3):
        assert ftr_igmgf(n, -0.4, 0.0, p) == pytest.approx(ftr_gmgf(n, -0.4, p), rel=1e-10)


# ---------------------------------------------------------------- lifting


def test_lift_rs_metric():
    p = P(1.2, 1.8, 9.0, 0.7)
    pdf_metric = LiftedMetric(lambda rp: rs_pdf(0.9, rp), RICIAN_SHADOWED)
    assert lift_rs_metric(pdf_metric, p) == pytest.approx(ftr_pdf(0.9, p), rel=1e-13)
    mgf_metric = LiftedMetric(lambda rp: rs_mgf(-1.2, rp), RICIAN_SHADOWED, vectorized=True)
    assert lift_rs_metric(mgf_metric, p) == pytest.approx(ftr_mgf(-1.2, p), rel=1e-10)
    one = LiftedMetric(lambda rp: 1.0, RICIAN_SHADOWED)
    assert lift_rs_metric(one, p) == pytest.approx(1.0, rel=1e-15)


def test_lift_nakagami_metric():
    p = P(1.0, 3, 10.0, 0.5)
    pdf_metric = LiftedMetric(lambda nk: nakagami_pdf(1.4, nk), NAKAGAMI)
    assert lift_nakagami_metric(pdf_metric, p) == pytest.approx(ftr_pdf_integer(1.4, p), rel=1e-13)
    one = LiftedMetric(lambda nk: 1.0, NAKAGAMI)
    assert lift_nakagami_metric(one, p) == pytest.approx(1.0, rel=1e-13)
    ccdf = LiftedMetric(lambda nk: nakagami_ccdf(0.8, nk), NAKAGAMI, vectorized=True)
    assert lift_nakagami_metric(ccdf, p) == pytest.approx(1 - ftr_cdf(0.8, p), abs=1e-8)


def test_lift_kind_checked():
    p = P(1.0, 2, 1.0, 0.1)
    with pytest.raises(ValueError):
        lift_rs_metric(LiftedMetric(lambda nk: 1.0, NAKAGAMI), p)
    with pytest.raises(ValueError):
        lift_nakagami_metric(LiftedMetric(lambda rp: 1.0, RICIAN_SHADOWED), p)
    with pytest.raises(ValueError):
        LiftedMetric(lambda q: 1.0, "rayleigh")
    with pytest.raises(DomainError):
        lift_nakagami_metric(LiftedMetric(lambda nk: 1.0, NAKAGAMI), P(1.0, 1.5, 1.0, 0.1))
