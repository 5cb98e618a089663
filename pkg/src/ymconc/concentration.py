"""Monte Carlo view of the pushforward measure of Haar under t.

Samples are produced in fixed-size chunks; chunk ``c`` draws from
``RngStream(seed, c)``.  The chunk size depends only on the lattice and N,
so a batch is bitwise identical whatever the number of worker threads.
All statistics refer to the rescaled variable ``N * t``.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .action import action_t_batch, max_action
from .haar import RngStream, sample_haar_batch
from .moments import MomentReport, leading_moment

CHUNK_ELEMENTS = 2**21
MAX_CHUNK = 4096
N_BATCH_MEANS = 100
DEFAULT_BINS = 61
DEFAULT_HALF_WIDTH_SD = 5.0


def default_workers():
    return os.cpu_count() or 1


def chunk_size(shape, N):
    return int(np.clip(CHUNK_ELEMENTS // (shape.n_edges * N * N), 1, MAX_CHUNK))


def _chunk(shape, N, seed, index, count):
    links = sample_haar_batch(N, (count, shape.K, shape.D), RngStream(seed, index))
    return action_t_batch(links, shape)


@dataclass(frozen=True)
class SampleBatch:
    D: int
    L: int
    K: int
    N: int
    seed: int
    n_samples: int
    values: np.ndarray = field(repr=False)

    @property
    def rescaled(self):
        return self.N * self.values

    @property
    def limit_variance(self):
        return limit_variance(self.K, self.D)


def sample_t(shape, N, n_samples, seed, workers=None):
    """i.i.d. draws of t(U) with every link Haar on U(N)."""
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    if N < 1:
        raise ValueError("N must be at least 1")
    size = chunk_size(shape, N)
    jobs = [(i, min(size, n_samples - start)) for i, start in enumerate(range(0, n_samples, size))]
    workers = workers or default_workers()
    if workers == 1 or len(jobs) == 1:
        parts = [_chunk(shape, N, seed, i, c) for i, c in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _chunk(shape, N, seed, *job), jobs))
    values = np.concatenate(parts)
    values.setflags(write=False)
    return SampleBatch(shape.D, shape.L, shape.K, N, seed, n_samples, values)


def limit_variance(K, D):
    return D * (D - 1) / (4 * K)


def gaussian_limit_density(t, K, D):
    """sqrt(2K / (pi D (D-1))) exp(-2K t^2 / (D (D-1))), the limit law of N t."""
    if K < 1 or D < 2:
        raise ValueError("need K >= 1 and D >= 2")
    c = D * (D - 1)
    t = np.asarray(t, dtype=float)
    return np.sqrt(2 * K / (np.pi * c)) * np.exp(-2 * K * t * t / c)


def gaussian_limit_cdf(t, K, D):
    return stats.norm.cdf(t, scale=np.sqrt(limit_variance(K, D)))


def batch_means_stderr(x, n_batches=N_BATCH_MEANS):
    """Standard error of the mean of ``x`` from contiguous batch means."""
    x = np.asarray(x, dtype=float)
    nb = min(n_batches, x.size)
    if nb < 2:
        return float("nan")
    means = np.array([b.mean() for b in np.array_split(x, nb)])
    return float(means.std(ddof=1) / np.sqrt(nb))


def empirical_moments(batch, l_max, n_batches=N_BATCH_MEANS):
    """Moments 1..l_max of N t with batch-mean errors and the limit targets."""
    if not 1 <= l_max <= 8:
        raise ValueError("l_max must lie in 1..8")
    x = batch.rescaled
    out = []
    for l in range(1, l_max + 1):
        xl = x**l
        out.append(MomentReport(
            l=l, value=float(xl.mean()), error=batch_means_stderr(xl, n_batches),
            N=batch.N, D=batch.D, L=batch.L, K=batch.K, kind="empirical",
            target=leading_moment(l, batch.K, batch.D),
        ))
    return out


def moment_allowance(l, N, K, D):
    """Finite-N systematic allowance on top of 5 standard errors.

    l = 2 is exact at every N, odd orders get m_2^(l/2) / N, even orders
    l >= 4 get 30% of m_l per power of 1/N.
    """
    if l == 2:
        return 0.0
    if l % 2:
        return leading_moment(2, K, D) ** (l / 2) / N
    return 0.3 * leading_moment(l, K, D) / N


def moment_passes(report, n_se=5.0):
    tol = n_se * report.error + moment_allowance(report.l, report.N, report.K, report.D)
    return abs(report.value - report.target) <= tol


def ks_distance(x, K, D):
    """Kolmogorov-Smirnov distance between samples of N t and the limit Gaussian."""
    x = np.asarray(x, dtype=float)
    return float(stats.kstest(x, "norm", args=(0.0, np.sqrt(limit_variance(K, D)))).statistic)


def ks_statistic(batch, K=None, D=None):
    if batch.n_samples < 1000:
        raise ValueError("KS statistic needs at least 1000 samples")
    return ks_distance(batch.rescaled, K or batch.K, D or batch.D)


@dataclass(frozen=True)
class Histogram:
    """Uniform-bin histogram; ``total`` counts in-range samples only."""

    edges: np.ndarray
    counts: np.ndarray
    total: int
    outside: int = 0

    @property
    def widths(self):
        return np.diff(self.edges)

    @property
    def density(self):
        if self.total == 0:
            return np.zeros_like(self.widths)
        return self.counts / (self.total * self.widths)


def histogram(batch, bins=DEFAULT_BINS, half_width_sd=DEFAULT_HALF_WIDTH_SD):
    """Histogram of N t over +-``half_width_sd`` limit standard deviations."""
    half = half_width_sd * np.sqrt(batch.limit_variance)
    edges = np.linspace(-half, half, bins + 1)
    counts, _ = np.histogram(batch.rescaled, bins=edges)
    total = int(counts.sum())
    return Histogram(edges, counts, total, batch.n_samples - total)


def within_action_bound(batch):
    return bool(np.all(np.abs(batch.values) <= max_action(batch.D) + 1e-12))
