"""Real-argument special functions behind the FTR formulas.

All routines are deterministic and keep no state.  Array inputs are
accepted where noted; the summation order never depends on the data
layout, so results are reproducible bit for bit.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "SeriesRangeError",
    "EvalResult",
    "ln_gamma",
    "pochhammer",
    "hyp1f1_scaled",
    "hyp1f1_log",
    "hyp2f1_nonpos",
    "legendre_p",
    "phi2_neg",
    "PHI2_MAX_ARG",
]

_EPS = np.finfo(float).eps
_RESCALE = 1e100
_LOG_RESCALE = math.log(_RESCALE)

# 1F1 switches from the power series to the large-z asymptotic series here.
# The discarded second asymptotic branch is O(exp(-z)) relative.
_HYP1F1_ASYMPTOTIC_Z = 60.0

# Largest |argument| for which phi2_neg sums the double series.  Beyond
# this the term matrix grows quadratically and callers should integrate
# the density instead.
PHI2_MAX_ARG = 300.0


class DomainError(ValueError):
    """Argument outside the mathematical domain of the function."""


class SeriesRangeError(ValueError):
    """Series evaluation is not reliable for the requested arguments."""


@dataclass(frozen=True)
class EvalResult:
    """A real value that may be held as sign * exp(value).

    When ``log_scaled`` is False, ``value`` is the plain (finite) result and
    ``sign`` is redundant.
    """

    value: float
    log_scaled: bool = False
    sign: float = 1.0

    def __float__(self):
        if self.log_scaled:
            return self.sign * math.exp(self.value)
        return self.value


def ln_gamma(x):
    """Natural log of the gamma function for x > 0."""
    if not x > 0:
        raise DomainError(f"ln_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def pochhammer(a, n):
    """Rising factorial (a)_n = a (a+1) ... (a+n-1), with (a)_0 = 1."""
    if n < 0 or int(n) != n:
        raise DomainError(f"pochhammer order must be a nonnegative integer, got {n!r}")
    out = 1.0
    for i in range(int(n)):
        out *= a + i
    return out


def _is_nonpos_int(v):
    return v <= 0 and float(v).is_integer()


# ---------------------------------------------------------------------------
# Confluent hypergeometric 1F1
# ---------------------------------------------------------------------------


def _hyp1f1_series_log(a, b, z):
    """Power series of 1F1(a; b; z) for z >= 0, returned as (log|F|, sign).

    Terms are accumulated with periodic rescaling so that arbitrarily large
    z cannot overflow.  Elements drop out of the working set as soon as the
    tail is negligible.
    """
    z = np.asarray(z, dtype=float)
    total = np.ones_like(z)
    logoff = np.zeros_like(z)
    active = np.flatnonzero(z > 0)
    term = np.ones(active.size)
    s = np.ones(active.size)
    off = np.zeros(active.size)
    za = z[active]
    k = 0
    zmax = float(za.max()) if za.size else 0.0
    kmax = int(zmax + 60.0 * math.sqrt(zmax) + 10.0 * abs(a) + 500)
    while active.size:
        for _ in range(16):
            term = term * (((a + k) / ((b + k) * (k + 1))) * za)
            s = s + term
            k += 1
        big = np.abs(s) > _RESCALE
        if big.any():
            s[big] /= _RESCALE
            term[big] /= _RESCALE
            off[big] += _LOG_RESCALE
        ratio = np.abs((a + k) / ((b + k) * (k + 1)) * za)
        done = (np.abs(term) <= 0.25 * _EPS * np.abs(s)) & (ratio < 1.0)
        if k > kmax:
            done[:] = True
        if done.any():
            idx = active[done]
            total.flat[idx] = s[done]
            logoff.flat[idx] = off[done]
            keep = ~done
            active, term, s, off, za = active[keep], term[keep], s[keep], off[keep], za[keep]
    with np.errstate(divide="ignore"):
        return np.log(np.abs(total)) + logoff, np.sign(total)


def _hyp1f1_asymptotic_log(a, b, z):
    """Large-z expansion of log 1F1(a; b; z) for a, b > 0.

    Returns (log F, ok) where ok flags elements whose asymptotic series
    reached full precision before diverging.
    """
    z = np.asarray(z, dtype=float)
    s = np.ones_like(z)
    term = np.ones_like(z)
    ok = np.zeros(z.shape, dtype=bool)
    live = np.ones(z.shape, dtype=bool)
    prev = np.full(z.shape, np.inf)
    for k in range(400):
        term = term * ((b - a + k) * (1.0 - a + k) / ((k + 1) * z))
        mag = np.abs(term)
        live &= mag <= prev
        s = s + np.where(live, term, 0.0)
        ok |= live & (mag <= 0.25 * _EPS * np.abs(s))
        live &= ~ok
        if not live.any():
            break
        prev = mag
    logf = z + (a - b) * np.log(z) + math.lgamma(b) - math.lgamma(a) + np.log(s)
    return logf, ok & (s > 0)


def _hyp1f1_log_parts(a, b, z):
    shape = np.shape(z)
    z = np.array(z, dtype=float).reshape(-1)
    if _is_nonpos_int(b):
        raise DomainError(f"1F1 undefined for b a non-positive integer, got b={b!r}")
    if np.any(z < 0):
        raise DomainError("hyp1f1 is only provided for z >= 0")
    logf = np.zeros(z.shape)
    sign = np.ones(z.shape)
    large = z > _HYP1F1_ASYMPTOTIC_Z
    if a > 0 and b > 0 and large.any():
        la, ok = _hyp1f1_asymptotic_log(a, b, z[large])
        idx = np.flatnonzero(large)
        logf.flat[idx[ok]] = la[ok]
        large.flat[idx[~ok]] = False
    else:
        large[...] = False
    rest = ~large
    if rest.any():
        ls, sg = _hyp1f1_series_log(a, b, z[rest])
        logf[rest] = ls
        sign[rest] = sg
    return logf.reshape(shape), sign.reshape(shape)


def hyp1f1_scaled(a, b, z, decay):
    """exp(-decay) * 1F1(a; b; z) without intermediate overflow.

    ``z`` and ``decay`` may be arrays (broadcast together); ``a`` and ``b``
    are scalars.  In the density formulas ``decay >= z`` so the result is
    bounded; the routine itself does not require it.
    """
    z, decay = np.broadcast_arrays(np.asarray(z, dtype=float), np.asarray(decay, dtype=float))
    if np.any(decay < 0):
        raise DomainError("decay must be nonnegative")
    logf, sign = _hyp1f1_log_parts(a, b, z)
    out = sign * np.exp(logf - decay)
    return float(out) if out.ndim == 0 else out


def hyp1f1_log(a, b, z):
    """1F1(a; b; z) for scalar z >= 0 as an EvalResult.

    The result switches to log-magnitude form once exp would overflow.
    """
    logf, sign = _hyp1f1_log_parts(a, b, np.asarray(float(z)))
    logf, sign = float(logf), float(sign)
    if logf < 700.0:
        return EvalResult(sign * math.exp(logf))
    return EvalResult(logf, log_scaled=True, sign=sign)


# ---------------------------------------------------------------------------
# Gauss hypergeometric 2F1 on z <= 0
# ---------------------------------------------------------------------------


def _hyp2f1_terminating(n, b, c, z):
    """2F1(-n, b; c; z) as a finite sum (n a nonnegative integer)."""
    terms = [1.0]
    t = 1.0
    for k in range(n):
        t *= (-n + k) * (b + k) / ((c + k) * (k + 1)) * z
        terms.append(t)
    return math.fsum(terms)


def _hyp2f1_euler(a, b, c, z):
    """Euler integral of 2F1 for c > b > 0 and z <= 0.

    The integral is split at t = 1/2 and each half is substituted
    (t = u^(1/b), 1 - t = v^(1/(c-b))) to absorb the endpoint power
    singularities, leaving a smooth integrand for adaptive quadrature.
    """
    from .quad import QuadSpec, integrate

    d = c - b
    spec = QuadSpec(rule="adaptive_subdivision", rel_tol=1e-14, abs_tol=1e-300, max_subdivisions=2000)

    def left(u):
        t = u ** (1.0 / b)
        return (1.0 - t) ** (d - 1.0) * (1.0 - z * t) ** (-a) / b

    def right(v):
        t = 1.0 - v ** (1.0 / d)
        return t ** (b - 1.0) * (1.0 - z * t) ** (-a) / d

    total = integrate(left, 0.0, 0.5**b, spec) + integrate(right, 0.0, 0.5**d, spec)
    lognorm = math.lgamma(c) - math.lgamma(b) - math.lgamma(d)
    return math.exp(lognorm) * total


def hyp2f1_nonpos(a, b, c, z):
    """Gauss hypergeometric 2F1(a, b; c; z) for real z <= 0.

    Covered regions: ``a`` or ``b`` a non-positive integer (finite sum), or
    c > b > 0 / c > a > 0 (Euler integral).  Anything else raises
    DomainError.
    """
    if z > 0:
        raise DomainError(f"hyp2f1_nonpos requires z <= 0, got z={z!r}")
    if _is_nonpos_int(c):
        raise DomainError(f"2F1 undefined for c a non-positive integer, got c={c!r}")
    if z == 0:
        return 1.0
    if _is_nonpos_int(a):
        return _hyp2f1_terminating(int(-a), b, c, z)
    if _is_nonpos_int(b):
        return _hyp2f1_terminating(int(-b), a, c, z)
    if c > b > 0:
        return _hyp2f1_euler(a, b, c, z)
    if c > a > 0:
        return _hyp2f1_euler(b, a, c, z)
    raise DomainError(
        f"2F1({a}, {b}; {c}; z) not covered: need a or b a non-positive integer, "
        "or c > b > 0 (or c > a > 0) for the Euler integral"
    )


# ---------------------------------------------------------------------------
# Legendre function of the first kind
# ---------------------------------------------------------------------------

_LEGENDRE_MAX_TERMS = 50_000_000


def legendre_p(v, x):
    """Legendre function P_v(x) of real degree v for x >= 1.

    Integer degrees use the terminating series 2F1(-v, v+1; 1; (1-x)/2).
    Otherwise the Pfaff-transformed form

        P_v(x) = ((x+1)/2)^v 2F1(-v, -v; 1; (x-1)/(x+1))

    is summed; every term is nonnegative, so there is no cancellation.
    """
    if not x >= 1.0:
        raise DomainError(f"legendre_p requires x >= 1, got x={x!r}")
    v = float(v)
    if v < -0.5:
        v = -v - 1.0  # P_v = P_{-v-1}
    if x == 1.0:
        return 1.0
    if v.is_integer():
        return _hyp2f1_terminating(int(v), v + 1.0, 1.0, (1.0 - x) / 2.0)
    w = (x - 1.0) / (x + 1.0)
    total = 0.0
    last = 1.0
    k0 = 0
    chunk = 256
    while True:
        k = np.arange(k0, k0 + chunk, dtype=float)
        ratios = ((k - v) / (k + 1.0)) ** 2 * w
        terms = last * np.concatenate(([1.0], np.cumprod(ratios)))
        total += math.fsum(terms[:-1])
        last = terms[-1]
        k0 += chunk
        if k0 > v + 1 and abs(last) <= 0.25 * _EPS * total:
            break
        if k0 > _LEGENDRE_MAX_TERMS:
            raise SeriesRangeError(f"legendre_p series did not converge for x={x!r}")
        chunk = min(2 * chunk, 1 << 16)
    return ((x + 1.0) / 2.0) ** v * total


# ---------------------------------------------------------------------------
# Humbert Phi2
# ---------------------------------------------------------------------------


def _log_poch_table(a, n):
    """log|(a)_j| and sign for j = 0..n-1; zero terms get log = -inf."""
    vals = a + np.arange(n - 1, dtype=float)
    logs = np.concatenate(([0.0], np.cumsum(np.log(np.abs(np.where(vals == 0, 1.0, vals))))))
    signs = np.concatenate(([1.0], np.cumprod(np.sign(vals))))
    logs[signs == 0] = -np.inf
    return logs, signs


def _series_len(arg, par):
    return int(arg + 25.0 * math.sqrt(arg + 1.0) + 2.0 * abs(par) + 40)


def _phi2_nonneg(alpha, beta, c, u, v):
    """Sum Phi2(alpha, beta; c; u, v) for u, v >= 0 as (log|S|, sign, cond)."""
    J = 1 if u == 0 else _series_len(u, alpha)
    K = 1 if v == 0 else _series_len(v, beta)
    for _ in range(4):
        try:
            return _phi2_block(alpha, beta, c, u, v, J, K)
        except _Truncated:
            J = J if u == 0 else 2 * J
            K = K if v == 0 else 2 * K
    raise SeriesRangeError("Phi2 double series did not converge")


class _Truncated(Exception):
    pass


def _phi2_block(alpha, beta, c, u, v, J, K):
    la, sa = _log_poch_table(alpha, J)
    lb, sb = _log_poch_table(beta, K)
    lc, sc = _log_poch_table(c, J + K - 1)
    lf = np.array([math.lgamma(i + 1.0) for i in range(max(J, K))])
    j = np.arange(J, dtype=float)
    k = np.arange(K, dtype=float)
    with np.errstate(divide="ignore"):
        row = la - lf[:J] + (j * math.log(u) if u > 0 else np.where(j == 0, 0.0, -np.inf))
        col = lb - lf[:K] + (k * math.log(v) if v > 0 else np.where(k == 0, 0.0, -np.inf))
    jk = np.add.outer(np.arange(J), np.arange(K))
    logt = row[:, None] + col[None, :] - lc[jk]
    sign = sa[:, None] * sb[None, :] * sc[jk]
    top = np.max(logt)
    scaled = sign * np.exp(logt - top)
    total = math.fsum(scaled.ravel())
    absum = float(np.sum(np.abs(scaled)))
    # only axes with a nonzero argument are truncated series
    edge = 0.0
    if u > 0:
        edge = max(edge, np.max(np.abs(scaled[-1, :])))
    if v > 0:
        edge = max(edge, np.max(np.abs(scaled[:, -1])))
    if edge > _EPS * absum:
        raise _Truncated
    if total == 0.0:
        return -np.inf, 0.0, np.inf
    return top + math.log(abs(total)), math.copysign(1.0, total), absum / abs(total)


def phi2_neg(b1, b2, c, x, y):
    """Humbert's bivariate confluent function Phi2(b1, b2; c; x, y), x, y <= 0.

    The double series is rewritten with the reflection

        Phi2(b1, b2; c; x, y) = e^x Phi2(c - b1 - b2, b2; c; -x, y - x)

    (applied to whichever argument is more negative), which makes both
    series arguments nonnegative.  For the parameter sets used by the FTR
    distribution functions every term is then positive.  Raises
    SeriesRangeError when |x| or |y| exceeds PHI2_MAX_ARG or when the
    summation loses more than ~1e-9 relative accuracy to cancellation.
    """
    if not c > 0:
        raise DomainError(f"phi2_neg requires c > 0, got c={c!r}")
    if x > 0 or y > 0:
        raise DomainError("phi2_neg requires x <= 0 and y <= 0")
    if max(-x, -y) > PHI2_MAX_ARG:
        raise SeriesRangeError(
            f"Phi2 arguments beyond |{PHI2_MAX_ARG}|; use the quadrature CDF path instead"
        )
    if y < x:
        b1, b2, x, y = b2, b1, y, x
    logs, sign, cond = _phi2_nonneg(c - b1 - b2, b2, c, -x, y - x)
    if cond * _EPS > 1e-10:
        raise SeriesRangeError(
            "Phi2 series cancellation too severe for these arguments; "
            "use the quadrature CDF path instead"
        )
    return sign * math.exp(x + logs) if sign else 0.0
