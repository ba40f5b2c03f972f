"""Monte Carlo channel simulator built directly on the physical model

    V = sqrt(zeta) V1 e^(j phi1) + sqrt(zeta) V2 e^(j phi2) + X + j Y,

with zeta ~ Gamma(m, mean 1), independent uniform phases and diffuse
X, Y ~ N(0, sigma^2).  The SNR is |V|^2.

Random streams are tied to fixed-size blocks: block b always draws from
SeedSequence(seed, spawn_key=(b,)), and per-block sums are combined with
math.fsum.  Results are therefore bit-identical for any batch size or
worker count.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .models import FtrParams
from .specfun import DomainError

__all__ = [
    "BLOCK",
    "McConfig",
    "SpecularAmplitudes",
    "derive_amplitudes",
    "draw_snr",
    "sample_snr",
    "mc_expectation",
    "mc_probability",
    "mc_outage_a",
    "mc_outage_b",
    "empirical_cdf",
]

BLOCK = 1 << 16


@dataclass(frozen=True)
class McConfig:
    """samples: total draws; batch: draws per worker task (rounded up to
    whole blocks); workers: thread count.  Only seed and samples affect
    the numbers."""

    samples: int
    seed: int = 0
    batch: int = BLOCK
    workers: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.batch < 1 or self.workers < 1:
            raise ValueError("batch and workers must be positive")


@dataclass(frozen=True)
class SpecularAmplitudes:
    v1: float
    v2: float
    sigma2: float

    @property
    def k(self):
        return (self.v1**2 + self.v2**2) / (2.0 * self.sigma2)

    @property
    def delta(self):
        power = self.v1**2 + self.v2**2
        return 2.0 * self.v1 * self.v2 / power if power > 0 else 0.0


def derive_amplitudes(p: FtrParams):
    """Specular amplitudes and diffuse variance giving (gamma_bar, K, delta)."""
    sigma2 = p.gamma_bar / (2.0 * (1.0 + p.k))
    s = 2.0 * sigma2 * p.k
    a = math.sqrt(s * (1.0 + p.delta))
    b = math.sqrt(s * (1.0 - p.delta))
    return SpecularAmplitudes(0.5 * (a + b), 0.5 * (a - b), sigma2)


def _block_rng(seed, index):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def draw_snr(p: FtrParams, rng, n):
    """n SNR draws from the physical model."""
    amp = derive_amplitudes(p)
    zeta = rng.gamma(p.m, 1.0 / p.m, n)
    phi1 = rng.uniform(0.0, 2.0 * math.pi, n)
    phi2 = rng.uniform(0.0, 2.0 * math.pi, n)
    sd = math.sqrt(amp.sigma2)
    x = rng.normal(0.0, sd, n)
    y = rng.normal(0.0, sd, n)
    root = np.sqrt(zeta)
    re = root * (amp.v1 * np.cos(phi1) + amp.v2 * np.cos(phi2)) + x
    im = root * (amp.v1 * np.sin(phi1) + amp.v2 * np.sin(phi2)) + y
    return re * re + im * im


def _block_sizes(samples):
    full, rest = divmod(samples, BLOCK)
    return [BLOCK] * full + ([rest] if rest else [])


def sample_snr(p: FtrParams, cfg: McConfig):
    """Yield SNR samples block by block (cfg.samples in total)."""
    for b, n in enumerate(_block_sizes(cfg.samples)):
        yield draw_snr(p, _block_rng(cfg.seed, b), n)


def _reduce_blocks(cfg, block_fn):
    """Evaluate block_fn(rng, n) -> tuple of floats for each block and add
    them component-wise with correctly rounded sums."""
    sizes = _block_sizes(cfg.samples)
    per_task = max(1, -(-cfg.batch // BLOCK))
    tasks = [range(i, min(i + per_task, len(sizes))) for i in range(0, len(sizes), per_task)]

    def run(task):
        return [block_fn(_block_rng(cfg.seed, b), sizes[b]) for b in task]

    if cfg.workers == 1 or len(tasks) == 1:
        chunks = [run(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(run, tasks))
    parts = [row for chunk in chunks for row in chunk]
    return tuple(math.fsum(col) for col in zip(*parts))


def mc_expectation(p: FtrParams, fn, cfg: McConfig):
    """Sample mean of fn(gamma) and its standard error."""

    def block(rng, n):
        v = np.asarray(fn(draw_snr(p, rng, n)), dtype=float)
        return math.fsum(v), math.fsum(v * v)

    s1, s2 = _reduce_blocks(cfg, block)
    n = cfg.samples
    mean = s1 / n
    var = max(s2 / n - mean * mean, 0.0) * n / max(n - 1, 1)
    return mean, math.sqrt(var / n)


def mc_probability(count_fn, cfg: McConfig):
    """Probability estimate from count_fn(rng, n) -> number of successes,
    with the binomial standard error sqrt(p (1 - p) / n)."""
    (hits,) = _reduce_blocks(cfg, lambda rng, n: (float(count_fn(rng, n)),))
    est = hits / cfg.samples
    return est, math.sqrt(est * (1.0 - est) / cfg.samples)


def mc_outage_a(sc, cfg: McConfig):
    """Empirical P(W / (Y + N0) < R_th)."""
    big_l, pi_ = sc.l_interferers, sc.p_i

    def count(rng, n):
        w = draw_snr(sc.channel, rng, n)
        y = rng.exponential(pi_, (big_l, n)).sum(axis=0)
        return np.count_nonzero(w < sc.r_th * (y + sc.n0))

    return mc_probability(count, cfg)


def mc_outage_b(sc, cfg: McConfig):
    """Empirical P(sum_i W_i / Y < R_th_hat) for N-branch MRC."""
    big_n, big_l, pi_ = sc.n_antennas, sc.l_interferers, sc.p_i

    def count(rng, n):
        w = draw_snr(sc.channel, rng, big_n * n).reshape(big_n, n).sum(axis=0)
        y = rng.exponential(pi_, (big_l, n)).sum(axis=0)
        return np.count_nonzero(w < sc.r_th_hat * y)

    return mc_probability(count, cfg)


def empirical_cdf(samples, grid):
    """Fraction of samples <= each grid point.  ``samples`` may be an
    array or an iterable of arrays (as produced by sample_snr)."""
    if isinstance(samples, np.ndarray):
        data = samples.ravel()
    else:
        blocks = [np.asarray(b, dtype=float).ravel() for b in samples]
        data = np.concatenate(blocks) if blocks else np.empty(0)
    if data.size == 0:
        raise DomainError("empirical_cdf needs at least one sample")
    data = np.sort(data)
    return np.searchsorted(data, np.asarray(grid, dtype=float), side="right") / data.size
