"""Deterministic one-dimensional quadrature.

Integrands are called with a 1-D array of abscissae and must return an
array whose leading axis matches it; trailing axes are integrated
elementwise, which lets a whole x-grid ride along a single theta sweep.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "QuadSpec",
    "IntegrationError",
    "integrate",
    "integrate_theta",
    "integrate_semi_infinite",
    "DEFAULT_SPEC",
]

RULES = ("fixed_gauss_legendre", "adaptive_subdivision")

_EPS = np.finfo(float).eps
_PANEL_NODES = 15


@dataclass(frozen=True)
class QuadSpec:
    """Quadrature rule and tolerance contract.

    ``abs_tol`` defaults to a value so small that the relative tolerance
    governs; an integral that is zero up to roundoff is still accepted
    through a floor of 50 ulp of the integrated |f|.
    """

    rule: str = "fixed_gauss_legendre"
    nodes: int = 64
    rel_tol: float = 1e-12
    abs_tol: float = 1e-300
    max_subdivisions: int = 1000

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown quadrature rule {self.rule!r}; expected one of {RULES}")
        if self.nodes < 2:
            raise ValueError("nodes must be >= 2")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("rel_tol and abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be positive")


DEFAULT_SPEC = QuadSpec()


class IntegrationError(RuntimeError):
    """Raised when the requested tolerance cannot be met."""

    def __init__(self, message, estimate, error):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


@lru_cache(maxsize=None)
def _gauss_legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def _eval_panels(f, lo, hi, n):
    """Gauss-Legendre sums over each panel [lo[i], hi[i]].

    Returns (values, abs_values) with shape (panels, *out).
    """
    x, w = _gauss_legendre(n)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    vals = np.asarray(f(pts), dtype=float)
    if vals.ndim == 0:
        vals = np.full(pts.shape, float(vals))
    if vals.shape[0] != pts.size:
        raise ValueError("integrand must return one value (or row) per abscissa")
    vals = vals.reshape((lo.size, n) + vals.shape[1:])
    if not np.all(np.isfinite(vals)):
        raise IntegrationError("integrand returned non-finite values", np.nan, np.inf)
    wshape = (1, n) + (1,) * (vals.ndim - 2)
    ww = w.reshape(wshape)
    hh = half.reshape((lo.size,) + (1,) * (vals.ndim - 2))
    return hh * np.sum(ww * vals, axis=1), hh * np.sum(ww * np.abs(vals), axis=1)


def _tolerance(spec, value, resabs):
    return np.maximum(np.maximum(spec.abs_tol, spec.rel_tol * np.abs(value)), 50.0 * _EPS * resabs)


def _finish(value):
    return float(value) if np.ndim(value) == 0 else value


def _fixed(f, a, b, spec):
    lo, hi = np.array([a]), np.array([b])
    fine, resabs = _eval_panels(f, lo, hi, spec.nodes)
    coarse, _ = _eval_panels(f, lo, hi, max(spec.nodes // 2, 1))
    fine, resabs, coarse = fine[0], resabs[0], coarse[0]
    # The coarse-vs-fine difference bounds the coarse error and is used as
    # is; squaring it would trust convergence the integrand may not have.
    est = np.abs(fine - coarse)
    if np.all(est <= _tolerance(spec, fine, resabs)):
        return fine
    return None


def _adaptive(f, a, b, spec):
    n = _PANEL_NODES
    lo = np.array([a, 0.5 * (a + b)])
    hi = np.array([0.5 * (a + b), b])
    whole, _ = _eval_panels(f, np.array([a]), np.array([b]), n)
    halves, habs = _eval_panels(f, lo, hi, n)
    # Each interval keeps its own coarse sum plus the two half-panel sums.
    iv_lo = np.array([a])
    iv_hi = np.array([b])
    coarse = whole
    left, right = halves[0:1], halves[1:2]
    labs, rabs = habs[0:1], habs[1:2]
    while True:
        value = left + right
        err = np.abs(coarse - value)
        total = value.sum(axis=0)
        total_abs = (labs + rabs).sum(axis=0)
        total_err = err.sum(axis=0)
        tol = _tolerance(spec, total, total_abs)
        if np.all(total_err <= tol):
            return total
        if iv_lo.size >= spec.max_subdivisions:
            raise IntegrationError(
                f"adaptive quadrature did not converge within {spec.max_subdivisions} subdivisions",
                _finish(total),
                _finish(total_err),
            )
        score = err / tol
        if score.ndim > 1:
            score = score.reshape(score.shape[0], -1).max(axis=1)
        order = np.argsort(-score, kind="stable")
        top = score[order[0]]
        room = spec.max_subdivisions - iv_lo.size
        pick = order[score[order] >= 0.25 * top][: max(1, min(32, room))]
        keep = np.setdiff1d(np.arange(iv_lo.size), pick)
        mid = 0.5 * (iv_lo[pick] + iv_hi[pick])
        c_lo = np.concatenate((iv_lo[pick], mid))
        c_hi = np.concatenate((mid, iv_hi[pick]))
        c_coarse = np.concatenate((left[pick], right[pick]))
        c_mid = 0.5 * (c_lo + c_hi)
        q, qabs = _eval_panels(f, np.concatenate((c_lo, c_mid)), np.concatenate((c_mid, c_hi)), n)
        m = c_lo.size
        iv_lo = np.concatenate((iv_lo[keep], c_lo))
        iv_hi = np.concatenate((iv_hi[keep], c_hi))
        coarse = np.concatenate((coarse[keep], c_coarse))
        left = np.concatenate((left[keep], q[:m]))
        right = np.concatenate((right[keep], q[m:]))
        labs = np.concatenate((labs[keep], qabs[:m]))
        rabs = np.concatenate((rabs[keep], qabs[m:]))
        # keep a canonical interval order so results never depend on history
        srt = np.argsort(iv_lo, kind="stable")
        iv_lo, iv_hi, coarse = iv_lo[srt], iv_hi[srt], coarse[srt]
        left, right, labs, rabs = left[srt], right[srt], labs[srt], rabs[srt]


def integrate(f, a, b, spec=DEFAULT_SPEC):
    """Integral of ``f`` over the finite interval [a, b]."""
    a, b = float(a), float(b)
    if a == b:
        probe = np.asarray(f(np.array([a])), dtype=float)
        return _finish(np.zeros(probe.shape[1:]))
    if spec.rule == "fixed_gauss_legendre":
        out = _fixed(f, a, b, spec)
        if out is not None:
            return _finish(out)
    return _finish(_adaptive(f, a, b, spec))


def integrate_theta(f, spec=DEFAULT_SPEC):
    """(1/pi) * integral of ``f`` over theta in [0, pi]."""
    out = integrate(f, 0.0, math.pi, spec)
    return out / math.pi


def integrate_semi_infinite(f, lower, spec=DEFAULT_SPEC, rate=1.0):
    """Integral of ``f`` over [lower, inf).

    Uses x = lower - ln(1 - t) / rate on t in [0, 1).  ``rate`` should not
    exceed the exponential decay rate of ``f``; the transformed integrand is
    then bounded at t -> 1.
    """
    if not rate > 0:
        raise ValueError("rate must be positive")
    lower = float(lower)

    def g(t):
        x = lower - np.log1p(-t) / rate
        vals = np.asarray(f(x), dtype=float)
        jac = 1.0 / (rate * (1.0 - t))
        return vals * jac.reshape((-1,) + (1,) * (vals.ndim - 1))

    return integrate(g, 0.0, 1.0, spec)
