"""Free energies ln Z of the lattice theory and their approximations.

Conventions: ``Z = int dU exp((2 N^2 K / lambda) t(U))`` and every ``f_*``
is a total ``ln Z``.  Densities divide by ``K N^2`` (per plaquette per N^2
in two dimensions).
"""

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np
from scipy import special

from .action import wilson_exponent
from .concentration import sample_t

# N values and basis for the large-N extrapolation of the one-plaquette integral
ORACLE_NS = (8, 12, 16, 24, 32, 48)
CRITICAL_LAMBDA = 2.0


def _check_lambda(lam):
    if not lam > 0:
        raise ValueError(f"coupling lambda must be positive, got {lam!r}")


def gaussian_free_energy(lam, D, K, N):
    """ln of int exp((2N^2K/lambda) t) against the limit Gaussian: K N^2 D(D-1) / (2 lambda^2)."""
    _check_lambda(lam)
    return K * N * N * D * (D - 1) / (2.0 * lam * lam)


def weak_coupling_free_energy(lam, D, K, N):
    """N^2 K (2 C(D,2) / lambda + (D-1)/2 ln C(D,2)), the endpoint evaluation at t = C(D,2)."""
    _check_lambda(lam)
    if D < 2:
        raise ValueError("D must be at least 2")
    c = math.comb(D, 2)
    return N * N * K * (2.0 * c / lam + 0.5 * (D - 1) * math.log(c))


def weak_scaling_exponent(D, K, N):
    """Power of t governing the pushforward density near its maximum."""
    if D < 2:
        raise ValueError("D must be at least 2")
    return (D - 1) * (N * N - 1) * K / 2


# -- Monte Carlo ------------------------------------------------------------------

@dataclass(frozen=True)
class LogPartitionEstimate:
    estimate: float
    stderr: float
    n_samples: int
    warnings: tuple = field(default=())


def naive_estimator_warning(lam, D):
    if lam < D * (D - 1):
        return f"lambda={lam:g} < D(D-1)={D * (D - 1)}: tail-dominated integrand, naive estimator unreliable"
    return None


def log_mean_exp(a):
    """ln mean(exp(a)) and its delta-method standard error."""
    a = np.asarray(a, dtype=float)
    top = a.max()
    w = np.exp(a - top)
    mean = w.mean()
    se = w.std(ddof=1) / (np.sqrt(a.size) * mean) if a.size > 1 else float("nan")
    return float(top + np.log(mean)), float(se)


def mc_log_partition(shape, N, lam, n_samples, seed, workers=None):
    """ln Z as the log of the sample mean of the Wilson weight over Haar draws."""
    _check_lambda(lam)
    notes = []
    msg = naive_estimator_warning(lam, shape.D)
    if msg:
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)
    batch = sample_t(shape, N, n_samples, seed, workers)
    est, se = log_mean_exp(wilson_exponent(batch.values, lam, shape.K, N))
    return LogPartitionEstimate(est, se, n_samples, tuple(notes))


# -- oracles ------------------------------------------------------------------------

def u1_torus_log_partition(K, lam, tol=1e-17):
    """Exact ln Z for U(1) on a two-dimensional periodic lattice with K plaquettes.

    Z = sum over integer charges n of I_n(2/lambda)^K.
    """
    _check_lambda(lam)
    beta = 2.0 / lam
    terms = [special.ive(0, beta) ** K]
    n = 1
    while True:
        term = 2.0 * special.ive(n, beta) ** K
        terms.append(term)
        if term < tol * terms[0]:
            break
        n += 1
    return K * beta + math.log(math.fsum(terms))


def one_plaquette_log_z(N, lam, dps=None):
    """ln int dU exp((2N/lambda) Re Tr U) on U(N), as ln det[I_{j-k}(2N/lambda)]."""
    _check_lambda(lam)
    x = 2.0 * N / lam
    if dps is None:
        # det cancels roughly e^{2x} per step of the elimination
        dps = 30 + int(4 * x / math.log(10))
    with mpmath.workdps(dps):
        xm = mpmath.mpf(2 * N) / mpmath.mpf(lam)
        bessel = [mpmath.besseli(k, xm) for k in range(N)]
        m = mpmath.matrix(N, N)
        for j in range(N):
            for k in range(N):
                m[j, k] = bessel[abs(j - k)]
        return float(mpmath.log(mpmath.det(m)))


@lru_cache(maxsize=None)
def one_plaquette_density_limit(lam, ns=ORACLE_NS):
    """Large-N limit of ln z_1(N, lambda) / N^2.

    Fits a + b/N^2 + c ln(N)/N^2 + d/N^4 to the exact finite-N values; the
    log term is the Haar-volume correction of the weak-coupling phase.
    Returns ``(limit, values)``.
    """
    ns = np.asarray(ns, dtype=float)
    vals = np.array([one_plaquette_log_z(int(n), lam) / n**2 for n in ns])
    basis = np.column_stack([np.ones_like(ns), ns**-2, np.log(ns) / ns**2, ns**-4])
    coef, *_ = np.linalg.lstsq(basis, vals, rcond=None)
    return float(coef[0]), tuple(vals)


def reference_free_energy_d2(lam):
    """Large-N D=2 free energy per plaquette per N^2.

    Strong branch (lambda >= 2): 1 / lambda^2.  Weak branch: the extrapolated
    one-plaquette integral, which is exact in two dimensions at large N.
    """
    _check_lambda(lam)
    if lam >= CRITICAL_LAMBDA:
        return 1.0 / (lam * lam)
    return one_plaquette_density_limit(float(lam))[0]


def reference_branch(lam):
    return "strong" if lam >= CRITICAL_LAMBDA else "weak-oracle"


# -- reports ------------------------------------------------------------------------

@dataclass(frozen=True)
class FreeEnergyReport:
    lam: float
    D: int
    L: int
    K: int
    N: int
    f_gaussian: float
    f_weak: float
    f_mc: float | None
    f_mc_stderr: float | None
    f_reference: float | None
    reference_branch: str | None
    warnings: tuple = ()

    @property
    def scale(self):
        return self.K * self.N * self.N

    def density(self, value):
        return None if value is None else value / self.scale

    @property
    def gaussian_matches_reference(self):
        """None outside D=2; else whether the Gaussian density is within 1% of the reference."""
        if self.f_reference is None:
            return None
        return abs(self.f_gaussian - self.f_reference) <= 0.01 * abs(self.f_reference)


def free_energy_report(lam, shape, N, n_samples=0, seed=0, workers=None):
    K = shape.K
    notes = []
    f_mc = f_se = None
    if n_samples > 0:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            mc = mc_log_partition(shape, N, lam, n_samples, seed, workers)
        f_mc, f_se = mc.estimate, mc.stderr
        notes.extend(mc.warnings)
    f_ref = branch = None
    if shape.D == 2:
        f_ref = reference_free_energy_d2(lam) * K * N * N
        branch = reference_branch(lam)
    return FreeEnergyReport(
        lam, shape.D, shape.L, K, N,
        gaussian_free_energy(lam, shape.D, K, N),
        weak_coupling_free_energy(lam, shape.D, K, N),
        f_mc, f_se, f_ref, branch, tuple(notes),
    )


def free_energy_sweep(lams, shape, N, n_samples=0, seed=0, workers=None):
    """Reports over a grid of couplings; one Haar sample set serves every lambda."""
    batch = sample_t(shape, N, n_samples, seed, workers) if n_samples > 0 else None
    out = []
    for lam in lams:
        lam = float(lam)
        base = free_energy_report(lam, shape, N)
        if batch is None:
            out.append(base)
            continue
        est, se = log_mean_exp(wilson_exponent(batch.values, lam, shape.K, N))
        msg = naive_estimator_warning(lam, shape.D)
        out.append(FreeEnergyReport(
            base.lam, base.D, base.L, base.K, base.N, base.f_gaussian, base.f_weak,
            est, se, base.f_reference, base.reference_branch, (msg,) if msg else (),
        ))
    return out
