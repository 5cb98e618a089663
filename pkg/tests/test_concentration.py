import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from ymconc.concentration import (
    MAX_CHUNK,
    batch_means_stderr,
    chunk_size,
    empirical_moments,
    gaussian_limit_cdf,
    gaussian_limit_density,
    histogram,
    ks_distance,
    ks_statistic,
    limit_variance,
    moment_allowance,
    moment_passes,
    sample_t,
    within_action_bound,
)
from ymconc.lattice import LatticeShape


def test_density_examples():
    assert gaussian_limit_density(0.0, 16, 2) == pytest.approx(np.sqrt(16 / np.pi), rel=1e-12)
    assert gaussian_limit_density(0.0, 16, 2) == pytest.approx(2.2568, abs=1e-4)
    assert limit_variance(9, 2) == pytest.approx(1 / 18)


@given(st.integers(1, 200), st.integers(2, 5))
@settings(max_examples=25, deadline=None)
def test_density_normalized(K, D):
    sd = np.sqrt(limit_variance(K, D))
    mass, _ = integrate.quad(gaussian_limit_density, -12 * sd, 12 * sd, args=(K, D))
    assert mass == pytest.approx(1.0, abs=1e-9)
    assert gaussian_limit_cdf(0.0, K, D) == pytest.approx(0.5)


def test_chunk_size_bounds():
    assert chunk_size(LatticeShape(2, 2), 1) == MAX_CHUNK
    assert chunk_size(LatticeShape(4, 8), 64) == 1


def test_sampling_independent_of_workers():
    shape = LatticeShape(2, 3)
    a = sample_t(shape, 4, 10_000, 5, workers=1)
    b = sample_t(shape, 4, 10_000, 5, workers=4)
    assert np.array_equal(a.values, b.values)
    assert a.values.shape == (10_000,)


def test_sampling_prefix_stable_at_chunk_boundaries():
    # chunk c always uses stream c, so whole chunks do not depend on the total
    shape = LatticeShape(2, 2)
    c = chunk_size(shape, 2)
    a = sample_t(shape, 2, c, 9)
    b = sample_t(shape, 2, 2 * c + 17, 9)
    assert np.array_equal(a.values, b.values[:c])


def test_batch_means_stderr():
    x = np.random.default_rng(0).standard_normal(100_000)
    assert batch_means_stderr(x) == pytest.approx(1 / np.sqrt(x.size), rel=0.2)
    assert batch_means_stderr(np.ones(10)) == 0.0
    assert np.isnan(batch_means_stderr(np.ones(1)))


def test_empirical_moments_targets():
    batch = sample_t(LatticeShape(2, 3), 6, 50_000, 123)
    reps = empirical_moments(batch, 4)
    assert [r.l for r in reps] == [1, 2, 3, 4]
    assert all(moment_passes(r) for r in reps)
    assert reps[1].target == pytest.approx(1 / 18)
    with pytest.raises(ValueError):
        empirical_moments(batch, 9)


def test_moment_allowance():
    assert moment_allowance(2, 4, 9, 2) == 0.0
    assert moment_allowance(3, 4, 9, 2) == pytest.approx((1 / 18) ** 1.5 / 4)
    assert moment_allowance(4, 8, 9, 2) == pytest.approx(0.3 * 3 / 324 / 8)


def test_ks_distance_on_exact_gaussian():
    K, D = 9, 2
    x = np.random.default_rng(4).normal(0, np.sqrt(limit_variance(K, D)), 50_000)
    assert ks_distance(x, K, D) < 0.01
    assert ks_distance(x * 2, K, D) > 0.1


def test_ks_needs_samples():
    with pytest.raises(ValueError):
        ks_statistic(sample_t(LatticeShape(2, 2), 2, 500, 1))


def test_histogram_normalization():
    batch = sample_t(LatticeShape(2, 3), 4, 20_000, 8)
    h = histogram(batch)
    assert len(h.counts) == 61
    assert h.total + h.outside == batch.n_samples
    assert np.sum(h.density * h.widths) == pytest.approx(1.0, abs=1e-12)
    assert within_action_bound(batch)
