"""Parameter sets and the two base distributions FTR is built from.

Powers are normalized with Es/N0 = 1, so the mean SNR and the mean
received power are the same number throughout the package.
"""

import math
from dataclasses import dataclass

import numpy as np

from .specfun import DomainError, hyp1f1_scaled

__all__ = [
    "FtrParams",
    "RsParams",
    "NakagamiParams",
    "MixtureTerm",
    "rs_pdf",
    "rs_mgf",
    "nakagami_pdf",
    "nakagami_ccdf",
    "nakagami_cdf",
    "nakagami_igmgf",
    "nakagami_mixture",
    "mixture_weights",
    "rs_nakagami_terms",
]


@dataclass(frozen=True)
class FtrParams:
    """Fluctuating two-ray channel: mean SNR, fluctuation severity m,
    specular-to-diffuse ratio K and specular similarity delta."""

    gamma_bar: float
    m: float
    k: float
    delta: float

    def __post_init__(self):
        if not self.gamma_bar > 0:
            raise ValueError(f"gamma_bar must be positive, got {self.gamma_bar!r}")
        if not self.m > 0:
            raise ValueError(f"m must be positive, got {self.m!r}")
        if not self.k >= 0:
            raise ValueError(f"k must be nonnegative, got {self.k!r}")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must lie in [0, 1], got {self.delta!r}")

    @property
    def diffuse_power(self):
        """2 sigma^2, the diffuse power; gamma_bar = 2 sigma^2 (1 + K)."""
        return self.gamma_bar / (1.0 + self.k)

    @property
    def sigma2(self):
        return 0.5 * self.diffuse_power

    @property
    def m_is_integer(self):
        return float(self.m).is_integer()

    def with_mean(self, gamma_bar):
        return FtrParams(gamma_bar, self.m, self.k, self.delta)

    def conditional_k(self, theta):
        """K (1 + delta cos theta): the Rician shadowed K seen at phase theta."""
        return self.k * (1.0 + self.delta * np.cos(theta))

    def conditional_rs(self, theta):
        """RS parameters at phase theta with gamma_bar / (1 + K) held fixed."""
        kr = self.conditional_k(theta)
        return RsParams(self.diffuse_power * (1.0 + kr), self.m, kr)


@dataclass(frozen=True)
class RsParams:
    """Squared Rician shadowed: mean, shadowing m and Rician factor K_r.

    Fields may be numpy arrays of a common shape when evaluating many
    conditional distributions at once.
    """

    gamma_bar: float
    m: float
    k_r: float

    def __post_init__(self):
        if not np.all(np.asarray(self.gamma_bar) > 0):
            raise ValueError("gamma_bar must be positive")
        if not np.all(np.asarray(self.m) > 0):
            raise ValueError("m must be positive")
        if not np.all(np.asarray(self.k_r) >= 0):
            raise ValueError("k_r must be nonnegative")


@dataclass(frozen=True)
class NakagamiParams:
    """Squared Nakagami: mean gamma_hat and integer shape m_hat."""

    gamma_hat: float
    m_hat: int

    def __post_init__(self):
        if not np.all(np.asarray(self.gamma_hat) > 0):
            raise ValueError("gamma_hat must be positive")
        if int(self.m_hat) != self.m_hat or self.m_hat < 1:
            raise ValueError(f"m_hat must be an integer >= 1, got {self.m_hat!r}")


@dataclass(frozen=True)
class MixtureTerm:
    weight: float
    base: NakagamiParams


def rs_pdf(x, p):
    """Density of the squared Rician shadowed SNR at x >= 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("rs_pdf requires x >= 0")
    g, m, kr = (np.asarray(v, dtype=float) for v in (p.gamma_bar, p.m, p.k_r))
    if m.ndim:
        raise ValueError("rs_pdf takes a scalar m")
    m = float(m)
    rate = (1.0 + kr) / g
    decay = rate * x
    z = decay * kr / (m + kr)
    out = (m / (m + kr)) ** m * rate * hyp1f1_scaled(m, 1.0, z, decay)
    return float(out) if np.ndim(out) == 0 else out


def rs_mgf(s, p):
    """MGF of the squared Rician shadowed SNR for s <= 0."""
    s = np.asarray(s, dtype=float)
    if np.any(s > 0):
        raise DomainError("rs_mgf is provided for s <= 0")
    g, m, kr = p.gamma_bar, p.m, p.k_r
    u = g * s / (1.0 + kr)
    out = m**m * (1.0 - u) ** (m - 1.0) / (m - (m + kr) * u) ** m
    return float(out) if np.ndim(out) == 0 else out


def _nakagami_logpdf(x, rate, m_hat):
    # rate = m_hat / gamma_hat
    with np.errstate(divide="ignore"):
        return m_hat * np.log(rate) + (m_hat - 1) * np.log(x) - math.lgamma(m_hat) - rate * x


def nakagami_pdf(x, p):
    """Density of the squared Nakagami SNR (integer m_hat) at x >= 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("nakagami_pdf requires x >= 0")
    m_hat = int(p.m_hat)
    rate = m_hat / np.asarray(p.gamma_hat, dtype=float)
    if m_hat == 1:
        out = rate * np.exp(-rate * x)
    else:
        out = np.exp(_nakagami_logpdf(x, rate, m_hat))
    return float(out) if np.ndim(out) == 0 else out


def nakagami_ccdf(x, p):
    """P(gamma > x) for the squared Nakagami SNR: Erlang survival function."""
    x = np.asarray(x, dtype=float)
    m_hat = int(p.m_hat)
    u = x * m_hat / np.asarray(p.gamma_hat, dtype=float)
    term = np.ones_like(u)
    acc = np.ones_like(u)
    for r in range(1, m_hat):
        term = term * u / r
        acc = acc + term
    out = np.exp(-u) * acc
    return float(out) if np.ndim(out) == 0 else out


def nakagami_cdf(x, p):
    """P(gamma <= x) for the squared Nakagami SNR.

    Below the mode the lower-gamma series is summed directly so that tiny
    probabilities keep full relative accuracy; elsewhere 1 - ccdf is exact
    enough.
    """
    x = np.asarray(x, dtype=float)
    m_hat = int(p.m_hat)
    u = np.broadcast_to(x * m_hat / np.asarray(p.gamma_hat, dtype=float), np.broadcast(x, np.asarray(p.gamma_hat)).shape)
    small = u < m_hat + 1.0
    out = np.empty(u.shape)
    if np.any(~small):
        out[~small] = 1.0 - nakagami_ccdf(u[~small], NakagamiParams(float(m_hat), m_hat))
    if np.any(small):
        us = u[small]
        # P(m, u) = u^m e^-u / m! * sum_k u^k / ((m+1)...(m+k))
        term = np.ones_like(us)
        acc = np.ones_like(us)
        for k in range(1, 200):
            term = term * us / (m_hat + k)
            acc = acc + term
            if np.all(term <= 1e-17 * acc):
                break
        with np.errstate(divide="ignore"):
            logu = np.log(us)
        out[small] = np.where(us > 0, np.exp(m_hat * logu - us - math.lgamma(m_hat + 1.0)) * acc, 0.0)
    return float(out) if out.ndim == 0 else out


def nakagami_igmgf(n, s, lam, p, log_shift=0.0):
    """Upper incomplete generalized MGF of the squared Nakagami SNR,

        G(n, s, lam) = integral_lam^inf x^n e^(s x) f(x) dx,   s <= 0,

    evaluated in closed form through the Erlang survival sum.  The result
    is multiplied by exp(log_shift) before leaving log space, which lets
    callers absorb a large external exponential factor without overflow.
    ``p.gamma_hat`` may be an array.
    """
    if n < 0 or int(n) != n:
        raise DomainError("n must be a nonnegative integer")
    if s > 0 or lam < 0:
        raise DomainError("nakagami_igmgf needs s <= 0 and lam >= 0")
    n = int(n)
    m_hat = int(p.m_hat)
    rate = m_hat / np.asarray(p.gamma_hat, dtype=float)
    u = rate - s
    order = m_hat + n
    log_head = (
        m_hat * np.log(rate)
        - order * np.log(u)
        + math.lgamma(order)
        - math.lgamma(m_hat)
        + log_shift
    )
    if lam == 0:
        out = np.exp(log_head)
    else:
        ul = u * lam
        logs = np.stack([j * np.log(ul) - math.lgamma(j + 1.0) for j in range(order)])
        top = logs.max(axis=0)
        poisson = top + np.log(np.exp(logs - top).sum(axis=0))
        out = np.exp(log_head - ul + poisson)
    return float(out) if np.ndim(out) == 0 else out


def _require_integer_m(p):
    if not p.m_is_integer:
        raise DomainError(f"the Nakagami mixture needs integer m, got m={p.m!r}")
    return int(p.m)


def mixture_weights(m, k_eff):
    """Binomial weights binom(m-1, i) m^i k^(m-1-i) / (m + k)^(m-1), i = 0..m-1.

    ``k_eff`` may be an array; the weight index is the leading axis.
    0^0 is taken as 1, so k_eff = 0 puts all mass on i = m - 1.
    """
    k_eff = np.asarray(k_eff, dtype=float)
    base_m = m / (m + k_eff)
    base_k = k_eff / (m + k_eff)
    out = np.empty((m,) + k_eff.shape)
    for i in range(m):
        out[i] = math.comb(m - 1, i) * base_m**i * base_k ** (m - 1 - i)
    return out


def rs_nakagami_terms(p):
    """Finite Nakagami expansion of an RS law with integer m.

    Returns (weights B_j, Omega_B); component j has mean (m - j) Omega_B and
    shape m - j.
    """
    m = int(p.m)
    if m != p.m:
        raise DomainError("rs_nakagami_terms needs integer m")
    weights = mixture_weights(m, p.k_r)
    omega = p.gamma_bar / (1.0 + p.k_r) * (m + p.k_r) / m
    return weights, omega


def nakagami_mixture(p, theta):
    """Conditional Nakagami mixture of an integer-m FTR channel at phase theta."""
    m = _require_integer_m(p)
    kt = float(p.conditional_k(theta))
    weights = mixture_weights(m, kt)
    omega = p.diffuse_power * (m + kt) / m
    return [MixtureTerm(float(weights[i]), NakagamiParams((m - i) * omega, m - i)) for i in range(m)]
