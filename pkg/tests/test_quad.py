import math

import numpy as np
import pytest

from ftrfading.quad import (
    DEFAULT_SPEC,
    IntegrationError,
    QuadSpec,
    integrate,
    integrate_semi_infinite,
    integrate_theta,
)

ADAPTIVE = QuadSpec(rule="adaptive_subdivision")


@pytest.mark.parametrize("spec", [DEFAULT_SPEC, ADAPTIVE])
def test_theta_examples(spec):
    assert integrate_theta(lambda t: np.full(t.shape, 3.0), spec) == pytest.approx(3.0, rel=1e-14)
    assert abs(integrate_theta(np.cos, spec)) < 1e-14
    assert integrate_theta(lambda t: 1.0 / (2.0 + np.cos(t)), spec) == pytest.approx(1 / math.sqrt(3), rel=1e-13)


@pytest.mark.parametrize("spec", [DEFAULT_SPEC, ADAPTIVE])
def test_semi_infinite_examples(spec):
    assert integrate_semi_infinite(lambda x: np.exp(-x), 0.0, spec) == pytest.approx(1.0, rel=1e-12)
    assert integrate_semi_infinite(lambda x: x * np.exp(-x), 0.0, spec) == pytest.approx(1.0, rel=1e-11)
    assert integrate_semi_infinite(lambda x: np.exp(-2 * x), 1.0, spec) == pytest.approx(math.exp(-2) / 2, rel=1e-12)


def test_vector_valued_integrand():
    a = np.array([1.0, 2.0, 3.0])
    out = integrate(lambda t: np.exp(-np.outer(t, a)), 0.0, 1.0)
    assert np.allclose(out, (1 - np.exp(-a)) / a, rtol=1e-13, atol=0)


def test_endpoint_singularity_handled_by_adaptive_fallback():
    assert integrate(np.sqrt, 0.0, 1.0) == pytest.approx(2 / 3, rel=1e-12)


def test_doubling_nodes_is_stable():
    f = lambda t: np.exp(np.cos(t)) / (3.0 + np.sin(t))
    a = integrate_theta(f, QuadSpec(nodes=64))
    b = integrate_theta(f, QuadSpec(nodes=128))
    assert abs(a - b) <= 10 * 1e-12 * abs(a)


def test_deterministic():
    f = lambda t: 1.0 / (1.01 - np.cos(t))
    assert integrate_theta(f) == integrate_theta(f)


def test_nonconvergence_reports_estimate():
    spec = QuadSpec(rule="adaptive_subdivision", max_subdivisions=3, rel_tol=1e-15)
    with pytest.raises(IntegrationError) as info:
        integrate(lambda t: np.sin(200 * t) ** 2, 0.0, 10.0, spec)
    assert np.isfinite(info.value.estimate) and info.value.error > 0


@pytest.mark.parametrize(
    "kwargs",
    [dict(rule="simpson"), dict(nodes=1), dict(rel_tol=0.0), dict(abs_tol=-1.0), dict(max_subdivisions=0)],
)
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        QuadSpec(**kwargs)


def test_nonfinite_integrand_rejected():
    with pytest.raises(IntegrationError):
        integrate(lambda t: 1.0 / (t - 0.5) * np.where(t == t, np.inf, 1.0), 0.0, 1.0)
