"""Outage probability with co-channel interference.

Scenario A: one FTR branch, L equal-power Rayleigh interferers and
background noise; integer m.  Scenario B: N-branch MRC over i.i.d. FTR
branches, interference limited; any m.  Thresholds are linear.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .ftr import NAKAGAMI, LiftedMetric, ftr_gmgf, lift_nakagami_metric
from .models import FtrParams, _require_integer_m, nakagami_cdf, nakagami_igmgf
from .quad import DEFAULT_SPEC

__all__ = [
    "ScenarioA",
    "ScenarioB",
    "NumericalConsistencyError",
    "interference_cdf",
    "outage_a",
    "outage_b",
    "compositions",
    "normalized_sinr",
]

CLAMP_SLACK = 1e-9


class NumericalConsistencyError(ArithmeticError):
    """A probability landed outside [0, 1] by more than rounding can explain."""


@dataclass(frozen=True)
class ScenarioA:
    """Desired FTR signal (mean power channel.gamma_bar), L interferers of
    mean power p_i each, noise power n0 and SINR threshold r_th."""

    channel: FtrParams
    l_interferers: int
    p_i: float
    n0: float
    r_th: float

    def __post_init__(self):
        _require_integer_m(self.channel)
        if int(self.l_interferers) != self.l_interferers or self.l_interferers < 1:
            raise ValueError("l_interferers must be a positive integer")
        for name in ("p_i", "n0", "r_th"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class ScenarioB:
    """N-branch MRC, per-branch mean power channel.gamma_bar, L interferers
    of mean power p_i, SIR threshold r_th_hat."""

    channel: FtrParams
    n_antennas: int
    l_interferers: int
    p_i: float
    r_th_hat: float

    def __post_init__(self):
        for name in ("n_antennas", "l_interferers"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer")
        for name in ("p_i", "r_th_hat"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def _clamp(p):
    if -CLAMP_SLACK <= p < 0.0:
        return 0.0
    if 1.0 < p <= 1.0 + CLAMP_SLACK:
        return 1.0
    if not 0.0 <= p <= 1.0:
        raise NumericalConsistencyError(f"outage probability {p!r} is outside [0, 1]")
    return p


def interference_cdf(y, l, p_i):
    """CDF of the sum of l i.i.d. exponential powers with mean p_i."""
    y = np.asarray(y, dtype=float)
    u = y / p_i
    term = np.ones_like(u)
    acc = np.ones_like(u)
    for k in range(1, l):
        term = term * u / k
        acc = acc + term
    out = -np.expm1(-u) - np.exp(-u) * (acc - 1.0)
    return float(out) if out.ndim == 0 else out


def normalized_sinr(sc: ScenarioA):
    return sc.channel.gamma_bar / (sc.l_interferers * sc.p_i + sc.n0)


def _conditional_outage_a(sc):
    """Outage metric of a single Nakagami branch (vectorized over gamma_hat).

    P = F(R N0) + sum_{k<L} sum_{l<=k} e^(N0/P_I) (-N0)^(k-l)
        / (l! (k-l)! P_I^k R^l) * G(l, -1/(R P_I), R N0)

    The e^(N0/P_I) factor is handed to the IGMGF as a log shift, where it
    cancels against the e^(-R N0 / (R P_I)) part of the tail exponential.
    """
    r, n0, pi_, big_l = sc.r_th, sc.n0, sc.p_i, sc.l_interferers
    lam = r * n0
    s = -1.0 / (r * pi_)
    shift = n0 / pi_

    def metric(nk):
        total = nakagami_cdf(lam, nk)
        for k in range(big_l):
            for l in range(k + 1):
                coef = (-n0) ** (k - l) / (math.factorial(l) * math.factorial(k - l) * pi_**k * r**l)
                total = total + coef * nakagami_igmgf(l, s, lam, nk, log_shift=shift)
        return total

    return metric


def _conditional_outage_a_positive(sc):
    """Same metric rearranged into a sum of positive terms.

    With w = Lambda + t the interferer survival sum and the Nakagami
    polynomial (Lambda + t)^(m_hat - 1) expand into Gamma integrals, so
    for rate r and u = r + 1/(R P_I)

    P = F(Lambda) + r^m_hat e^(-r Lambda) / (m_hat - 1)!
        * sum_{k<L} sum_{j<m_hat} C(m_hat-1, j) Lambda^(m_hat-1-j)
          (k+j)! / (k! (R P_I)^k u^(k+j+1)).

    No cancellation occurs, which keeps the P_I -> 0 limit accurate.
    """
    r_th, big_l = sc.r_th, sc.l_interferers
    lam = r_th * sc.n0
    c = 1.0 / (r_th * sc.p_i)

    def metric(nk):
        m_hat = int(nk.m_hat)
        rate = m_hat / np.asarray(nk.gamma_hat, dtype=float)
        u = rate + c
        log_ratio = np.log(c / u)
        logs = []
        for k in range(big_l):
            for j in range(m_hat):
                log_t = (
                    math.log(math.comb(m_hat - 1, j))
                    + math.lgamma(k + j + 1.0)
                    - math.lgamma(k + 1.0)
                    + k * log_ratio
                    - (j + 1) * np.log(u)
                )
                if m_hat - 1 - j:
                    log_t = log_t + (m_hat - 1 - j) * math.log(lam)
                logs.append(log_t)
        logs = np.stack(logs)
        top = logs.max(axis=0)
        log_sum = top + np.log(np.exp(logs - top).sum(axis=0))
        tail = np.exp(m_hat * np.log(rate) - rate * lam - math.lgamma(m_hat) + log_sum)
        return nakagami_cdf(lam, nk) + tail

    return metric


OUTAGE_A_FORMS = ("positive", "igmgf")


def outage_a(sc: ScenarioA, spec=DEFAULT_SPEC, form="positive"):
    """Outage probability P(W / (Y + N0) < R_th) through the Nakagami mixture.

    ``form="igmgf"`` evaluates the CDF-plus-IGMGF double sum term by term;
    its alternating (-N0)^(k-l) factors cancel badly when N0 / P_I is large.
    The default ``"positive"`` form is the same quantity regrouped into
    positive terms.
    """
    if form not in OUTAGE_A_FORMS:
        raise ValueError(f"unknown form {form!r}; expected one of {OUTAGE_A_FORMS}")
    build = _conditional_outage_a_positive if form == "positive" else _conditional_outage_a
    metric = LiftedMetric(build(sc), NAKAGAMI, vectorized=True)
    return _clamp(float(lift_nakagami_metric(metric, sc.channel, spec)))


def compositions(k, n):
    """All n-tuples of nonnegative integers summing to k, lexicographic."""
    if k < 0 or n < 1:
        raise ValueError("need k >= 0 and n >= 1")
    return [c for c in product(range(k + 1), repeat=n) if sum(c) == k]


def outage_b(sc: ScenarioB):
    """Interference-limited MRC outage P(sum W_i / Y < R_th_hat), closed form."""
    s = -1.0 / (sc.r_th_hat * sc.p_i)
    ch = sc.channel

    @lru_cache(maxsize=None)
    def g(u):
        return ftr_gmgf(u, s, ch) / math.factorial(u)

    terms = []
    for k in range(sc.l_interferers):
        inner = math.fsum(math.prod(g(u) for u in c) for c in compositions(k, sc.n_antennas))
        terms.append((-s) ** k * inner)
    return _clamp(math.fsum(terms))
