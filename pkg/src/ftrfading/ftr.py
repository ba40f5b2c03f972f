"""FTR statistics.

Every statistic is either a closed form or a theta-average over the
conditional Rician shadowed (any m) or Nakagami (integer m) laws, with
gamma_bar / (1 + K) held fixed across the average.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .models import (
    FtrParams,
    NakagamiParams,
    RsParams,
    _require_integer_m,
    mixture_weights,
    nakagami_igmgf,
    nakagami_pdf,
    rs_pdf,
)
from .quad import DEFAULT_SPEC, QuadSpec, integrate, integrate_semi_infinite, integrate_theta
from .specfun import DomainError, hyp2f1_nonpos, legendre_p, phi2_neg

__all__ = [
    "LiftedMetric",
    "RICIAN_SHADOWED",
    "NAKAGAMI",
    "lift_rs_metric",
    "lift_nakagami_metric",
    "ftr_pdf",
    "ftr_pdf_integer",
    "ftr_cdf",
    "ftr_mgf",
    "ftr_mgf_theta",
    "ftr_gmgf",
    "ftr_moment",
    "ftr_imgf_lower",
    "ftr_imgf_upper",
    "ftr_igmgf",
    "tail_rate",
]

RICIAN_SHADOWED = "rician_shadowed"
NAKAGAMI = "nakagami"
CDF_PATHS = ("quadrature", "phi2")


@dataclass(frozen=True)
class LiftedMetric:
    """A performance metric of a base distribution, to be averaged over theta.

    ``base_metric`` receives RsParams or NakagamiParams.  With
    ``vectorized=True`` the parameter fields arrive as 1-D arrays over the
    theta nodes and the metric must return an array with that leading
    axis; otherwise it is called once per node with scalar fields.
    """

    base_metric: Callable
    base_kind: str
    vectorized: bool = False

    def __post_init__(self):
        if self.base_kind not in (RICIAN_SHADOWED, NAKAGAMI):
            raise ValueError(f"unknown base_kind {self.base_kind!r}")

    def evaluate(self, params_of_node, count, *fields):
        if self.vectorized:
            return np.asarray(self.base_metric(params_of_node(*fields)), dtype=float)
        rows = [self.base_metric(params_of_node(*(f[i] for f in fields))) for i in range(count)]
        return np.asarray(rows, dtype=float)


def _check_s(s):
    if s > 0:
        raise DomainError(f"statistics are provided for s <= 0, got s={s!r}")


def _scalar_or_array(out, like):
    return float(out) if np.ndim(like) == 0 else out


# ---------------------------------------------------------------- lifting


def lift_rs_metric(metric, p: FtrParams, spec: QuadSpec = DEFAULT_SPEC):
    """theta-average of an RS metric at K (1 + delta cos theta)."""
    if metric.base_kind != RICIAN_SHADOWED:
        raise ValueError("lift_rs_metric needs a rician_shadowed metric")

    def integrand(theta):
        kr = p.conditional_k(theta)
        gb = p.diffuse_power * (1.0 + kr)
        return metric.evaluate(lambda g, k: RsParams(g, p.m, k), theta.size, gb, kr)

    return integrate_theta(integrand, spec)


def lift_nakagami_metric(metric, p: FtrParams, spec: QuadSpec = DEFAULT_SPEC):
    """theta-average of sum_i C_i(theta) X((m - i) Omega(theta), m - i)."""
    if metric.base_kind != NAKAGAMI:
        raise ValueError("lift_nakagami_metric needs a nakagami metric")
    m = _require_integer_m(p)

    def integrand(theta):
        kt = p.conditional_k(theta)
        weights = mixture_weights(m, kt)
        omega = p.diffuse_power * (m + kt) / m
        total = 0.0
        for i in range(m):
            vals = metric.evaluate(lambda g, mh=m - i: NakagamiParams(g, mh), theta.size, (m - i) * omega)
            w = weights[i].reshape((-1,) + (1,) * (vals.ndim - 1))
            total = total + w * vals
        return total

    return integrate_theta(integrand, spec)


# ---------------------------------------------------------------- density


def ftr_pdf(x, p: FtrParams, spec: QuadSpec = DEFAULT_SPEC):
    """SNR density as a theta-mixture of Rician shadowed densities.

    ``x`` may be an array; all points share one theta quadrature.
    """
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa < 0):
        raise DomainError("ftr_pdf requires x >= 0")

    def metric(rp):
        return rs_pdf(xa[None, :], RsParams(rp.gamma_bar[:, None], rp.m, rp.k_r[:, None]))

    out = lift_rs_metric(LiftedMetric(metric, RICIAN_SHADOWED, vectorized=True), p, spec)
    return _scalar_or_array(np.asarray(out).reshape(np.shape(x)), x)


def ftr_pdf_integer(x, p: FtrParams, spec: QuadSpec = DEFAULT_SPEC):
    """SNR density as a theta-mixture of Nakagami densities (integer m)."""
    _require_integer_m(p)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa < 0):
        raise DomainError("ftr_pdf_integer requires x >= 0")

    def metric(nk):
        return nakagami_pdf(xa[None, :], NakagamiParams(nk.gamma_hat[:, None], nk.m_hat))

    out = lift_nakagami_metric(LiftedMetric(metric, NAKAGAMI, vectorized=True), p, spec)
    return _scalar_or_array(np.asarray(out).reshape(np.shape(x)), x)


def tail_rate(p: FtrParams):
    """Slowest exponential decay rate of the density over the theta sweep."""
    k_max = p.k * (1.0 + p.delta)
    return p.m / (p.diffuse_power * (p.m + k_max))


# ---------------------------------------------------------------- CDF / IMGF


def _lower_quadrature(s, z, p, spec):
    """integral_0^z e^(s x) f(x) dx by quadrature of the density.

    Past the mean the complement M(s) - integral_z^inf is used, so the
    region carrying most of the mass is integrated over a finite range and
    the tail with the exponential map.
    """
    if z == 0:
        return 0.0
    if z <= p.gamma_bar:
        return integrate(lambda t: np.exp(s * t) * ftr_pdf(t, p, spec), 0.0, z, spec)
    return ftr_mgf(s, p) - _upper_quadrature(s, z, p, spec)


def _upper_quadrature(s, z, p, spec):
    rate = 0.5 * (tail_rate(p) - s)
    return integrate_semi_infinite(lambda t: np.exp(s * t) * ftr_pdf(t, p, spec), z, spec, rate=rate)


def _lower_phi2(s, z, p, spec):
    if z == 0:
        return 0.0
    m, k = p.m, p.k
    c0 = (1.0 + k) / p.gamma_bar

    def integrand(theta):
        kt = p.conditional_k(theta)
        out = np.empty(theta.size)
        for i, kti in enumerate(kt):
            x = (s - c0) * z
            y = (s - c0 * m / (m + kti)) * z
            head = c0 * z * (m / (m + kti)) ** m
            out[i] = head * phi2_neg(1.0 - m, m, 2.0, x, y)
        return out

    return integrate_theta(integrand, spec)


def _scalar_loop(fn, x):
    xa = np.asarray(x, dtype=float)
    if xa.ndim == 0:
        return fn(float(xa))
    return np.array([fn(float(v)) for v in xa.ravel()]).reshape(xa.shape)


def ftr_cdf(x, p: FtrParams, spec: QuadSpec = DEFAULT_SPEC, path: str = "quadrature"):
    """P(gamma <= x).

    ``path="quadrature"`` integrates the density; ``path="phi2"`` uses the
    theta-integral of the bivariate confluent series and raises
    SeriesRangeError when its arguments are too large to be reliable.
    """
    if path not in CDF_PATHS:
        raise ValueError(f"unknown path {path!r}; expected one of {CDF_PATHS}")
    if np.any(np.asarray(x) < 0):
        raise DomainError("ftr_cdf requires x >= 0")
    lower = _lower_quadrature if path == "quadrature" else _lower_phi2
    return _scalar_loop(lambda v: min(1.0, max(0.0, lower(0.0, v, p, spec))), x)


def ftr_imgf_lower(s, z, p: FtrParams, spec: QuadSpec = DEFAULT_SPEC, path: str = "quadrature"):
    """Lower incomplete MGF: integral_0^z e^(s x) f(x) dx, s <= 0."""
    _check_s(s)
    if path not in CDF_PATHS:
        raise ValueError(f"unknown path {path!r}; expected one of {CDF_PATHS}")
    if z < 0:
        raise DomainError("z must be nonnegative")
    lower = _lower_quadrature if path == "quadrature" else _lower_phi2
    return lower(float(s), float(z), p, spec)


def ftr_imgf_upper(s, z, p: FtrParams, spec: QuadSpec = DEFAULT_SPEC):
    """Upper incomplete MGF, M(s) minus the lower one."""
    return ftr_mgf(s, p) - ftr_imgf_lower(s, z, p, spec)


# ---------------------------------------------------------------- MGF family


def ftr_mgf(s, p: FtrParams):
    """Closed-form MGF for s <= 0 through a Legendre function of degree m - 1."""
    _check_s(s)
    g, m, k, d = p.gamma_bar, p.m, p.k, p.delta
    a = (1.0 + k) * m - (m + k) * g * s
    r = a * a - (k * d * g * s) ** 2
    log_head = math.log1p(k) + m * math.log(m) + (m - 1.0) * math.log(1.0 + k - g * s) - 0.5 * m * math.log(r)
    arg = max(1.0, a / math.sqrt(r))
    return math.exp(log_head) * legendre_p(m - 1.0, arg)


def ftr_mgf_theta(s, p: FtrParams, spec: QuadSpec = DEFAULT_SPEC):
    """MGF as the theta-average of the Rician shadowed MGF."""
    _check_s(s)
    g, m = p.gamma_bar, p.m

    def integrand(theta):
        kt = p.conditional_k(theta)
        u = g * s / (1.0 + p.k)
        return m**m * (1.0 - u) ** (m - 1.0) / (m - (m + kt) * u) ** m

    return integrate_theta(integrand, spec)


def ftr_gmgf(n, s, p: FtrParams):
    """Generalized MGF: integral_0^inf x^n e^(s x) f(x) dx in closed form."""
    _check_s(s)
    if n < 0 or int(n) != n:
        raise DomainError("n must be a nonnegative integer")
    n = int(n)
    g, m, k, d = p.gamma_bar, p.m, p.k, p.delta
    den = m * (1.0 + k) - (m + k - k * d) * g * s
    z = 2.0 * k * d * g * s / den
    log_pre = (
        math.lgamma(n + 1.0)
        + m * math.log(m)
        + (m - n - 1.0) * math.log(1.0 + k - g * s)
        + n * math.log(g)
        + math.log1p(k)
        - m * math.log(den)
    )
    terms = []
    for l in range(n + 1):
        # (m)_l / l! * ((1 + K) K / den)^l
        outer = math.comb(n, l) * math.exp(
            math.lgamma(m + l) - math.lgamma(m) - math.lgamma(l + 1.0) + l * math.log((1.0 + k) / den)
        ) * k**l
        if outer == 0.0:
            continue
        inner = []
        half_q = 1.0  # (1/2)_q / q!
        for q in range(l + 1):
            if q:
                half_q *= (q - 0.5) / q
            w = math.comb(l, q) * (1.0 - d) ** (l - q) * (2.0 * d) ** q * half_q
            if w == 0.0:
                continue
            inner.append(w * hyp2f1_nonpos(m + l, 0.5 + q, q + 1.0, z))
        terms.append(outer * math.fsum(inner))
    return math.exp(log_pre) * math.fsum(terms)


def ftr_moment(n, p: FtrParams):
    """E[gamma^n], the s = 0 value of the generalized MGF."""
    return ftr_gmgf(n, 0.0, p)


def ftr_igmgf(n, s, lam, p: FtrParams, spec: QuadSpec = DEFAULT_SPEC):
    """Incomplete generalized MGF integral_lam^inf x^n e^(s x) f(x) dx, integer m."""
    _check_s(s)
    if lam < 0:
        raise DomainError("lam must be nonnegative")

    def metric(nk):
        return nakagami_igmgf(n, s, lam, nk)

    return lift_nakagami_metric(LiftedMetric(metric, NAKAGAMI, vectorized=True), p, spec)
