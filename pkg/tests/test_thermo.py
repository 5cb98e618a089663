import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from ymconc.haar import RngStream, sample_haar_batch
from ymconc.lattice import LatticeShape
from ymconc.thermo import (
    CRITICAL_LAMBDA,
    free_energy_report,
    free_energy_sweep,
    gaussian_free_energy,
    log_mean_exp,
    mc_log_partition,
    naive_estimator_warning,
    one_plaquette_density_limit,
    one_plaquette_log_z,
    reference_branch,
    reference_free_energy_d2,
    u1_torus_log_partition,
    weak_coupling_free_energy,
    weak_scaling_exponent,
)


def test_formula_examples():
    assert gaussian_free_energy(4.0, 2, 9, 4) == pytest.approx(9.0)
    assert weak_coupling_free_energy(1.0, 2, 9, 4) == pytest.approx(288.0)
    assert weak_coupling_free_energy(1.0, 3, 1, 1) == pytest.approx(6 + math.log(3))
    assert weak_scaling_exponent(2, 9, 4) == pytest.approx(67.5)
    with pytest.raises(ValueError):
        gaussian_free_energy(0.0, 2, 9, 4)
    with pytest.raises(ValueError):
        weak_coupling_free_energy(-1.0, 2, 9, 4)


@given(st.floats(0.1, 50), st.integers(2, 5), st.integers(1, 64), st.integers(1, 8))
def test_gaussian_scaling(lam, D, K, N):
    f = gaussian_free_energy(lam, D, K, N)
    assert f > 0
    assert gaussian_free_energy(2 * lam, D, K, N) == pytest.approx(f / 4)


def test_log_mean_exp():
    est, se = log_mean_exp(np.zeros(10))
    assert est == 0.0 and se == 0.0
    a = np.array([1000.0, 1000.0 + math.log(3)])
    assert log_mean_exp(a)[0] == pytest.approx(1000.0 + math.log(2))


def test_u1_small_beta():
    # ln Z ~ K beta^2 / 4 for U(1) at small beta = 2 / lambda
    K = 9
    lam = 200.0
    beta = 2 / lam
    assert u1_torus_log_partition(K, lam) == pytest.approx(K * beta**2 / 4, rel=1e-3)


def test_u1_single_charge_sector():
    # large K: only n = 0 survives
    lam = 1.0
    assert u1_torus_log_partition(400, lam) == pytest.approx(400 * math.log(special.iv(0, 2.0)), rel=1e-12)


def test_u1_oracle_vs_monte_carlo():
    shape = LatticeShape(2, 3)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        mc = mc_log_partition(shape, 1, 4.0, 200_000, 3)
    assert abs(mc.estimate - u1_torus_log_partition(shape.K, 4.0)) <= 5 * mc.stderr


def test_mc_warning():
    with pytest.warns(RuntimeWarning):
        est = mc_log_partition(LatticeShape(2, 2), 2, 1.0, 2000, 1)
    assert est.warnings
    assert naive_estimator_warning(3.0, 2) is None
    assert naive_estimator_warning(5.0, 3) is not None


@pytest.mark.parametrize("N, lam", [(1, 1.0), (2, 1.5), (3, 3.0)])
def test_one_plaquette_vs_monte_carlo(N, lam):
    u = sample_haar_batch(N, 400_000, RngStream(21, N))
    a = (2 * N / lam) * np.trace(u, axis1=-2, axis2=-1).real
    est, se = log_mean_exp(a)
    assert abs(one_plaquette_log_z(N, lam) - est) <= 5 * se


def test_one_plaquette_u1_is_bessel():
    assert one_plaquette_log_z(1, 0.5) == pytest.approx(math.log(special.iv(0, 4.0)), rel=1e-13)


def test_one_plaquette_precision_stable():
    a = one_plaquette_log_z(24, 0.8)
    b = one_plaquette_log_z(24, 0.8, dps=120)
    assert a == pytest.approx(b, rel=1e-12)


def test_reference_branches():
    assert reference_free_energy_d2(4.0) == pytest.approx(1 / 16)
    assert reference_branch(CRITICAL_LAMBDA) == "strong"
    assert reference_branch(1.0) == "weak-oracle"
    # continuous across the transition
    assert reference_free_energy_d2(1.999) == pytest.approx(0.25, abs=2e-3)


def test_reference_weak_branch_below_gaussian():
    for lam in (1.0, 1.5):
        ref = reference_free_energy_d2(lam)
        assert ref < 1 / lam**2
        assert abs(ref - 1 / lam**2) > 0.01 * ref


def test_density_limit_values_converge():
    limit, vals = one_plaquette_density_limit(1.0)
    assert abs(vals[-1] - limit) < abs(vals[0] - limit)


def test_report_and_sweep():
    shape = LatticeShape(2, 3)
    r = free_energy_report(3.0, shape, 4)
    assert r.f_gaussian == pytest.approx(r.f_reference)
    assert r.gaussian_matches_reference
    assert r.density(r.f_gaussian) == pytest.approx(1 / 9)
    assert free_energy_report(3.0, LatticeShape(3, 2), 2).f_reference is None
    sweep = free_energy_sweep([2.0, 8.0], shape, 2, n_samples=5000, seed=1)
    assert [s.lam for s in sweep] == [2.0, 8.0]
    assert all(s.f_mc is not None for s in sweep)
    assert sweep[0].warnings == ()
