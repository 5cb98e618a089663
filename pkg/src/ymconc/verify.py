"""Acceptance checks, shared by ``ymconc verify`` and the test suite.

Every check returns a :class:`CheckResult`; ``run_checks`` prints one
``PASS``/``FAIL`` line per check.
"""

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import action, concentration, moments, pairings, thermo, weingarten
from .haar import RngStream, sample_haar_batch, unitarity_residual
from .lattice import LatticeShape, identity_config, random_config

DEFAULT_SEED = 20261018


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail} [{self.seconds:.1f}s]"


def _chunks(total, size):
    start = 0
    while start < total:
        yield min(size, total - start)
        start += size


# 1 -----------------------------------------------------------------------------

def check_haar_sampler(seed=DEFAULT_SEED, n_samples=200_000, sizes=(2, 4, 8)):
    ok = True
    parts = []
    for N in sizes:
        abs2, tre, tim = [], [], []
        worst = 0.0
        for i, c in enumerate(_chunks(n_samples, 20_000)):
            u = sample_haar_batch(N, c, RngStream(seed, 1000 * N + i))
            worst = max(worst, unitarity_residual(u))
            tr = np.trace(u, axis1=-2, axis2=-1)
            abs2.append(np.abs(tr) ** 2)
            tre.append(tr.real)
            tim.append(tr.imag)
        abs2, tre, tim = map(np.concatenate, (abs2, tre, tim))
        se2 = concentration.batch_means_stderr(abs2)
        se_re = concentration.batch_means_stderr(tre)
        se_im = concentration.batch_means_stderr(tim)
        good = (abs(abs2.mean() - 1.0) <= 5 * se2 and abs(tre.mean()) <= 5 * se_re
                and abs(tim.mean()) <= 5 * se_im and worst <= 1e-10)
        ok &= good
        parts.append(f"N={N} E|TrU|^2={abs2.mean():.4f}+-{se2:.4f} "
                     f"E TrU=({tre.mean():+.4f},{tim.mean():+.4f}) resid={worst:.1e}")
    return ok, "; ".join(parts)


# 2 -----------------------------------------------------------------------------

def check_action_exactness(seed=DEFAULT_SEED, n_pairs=100):
    worst_id = 0.0
    for D, L in [(2, 2), (2, 4), (3, 2), (4, 2)]:
        shape = LatticeShape(D, L)
        t = action.action_t(identity_config(shape, 3))
        worst_id = max(worst_id, abs(t - D * (D - 1) / 2))
    combos = [(D, L, N) for D in (2, 3) for L in (2, 3) for N in (2, 3)]
    worst_g = 0.0
    for i in range(n_pairs):
        D, L, N = combos[i % len(combos)]
        shape = LatticeShape(D, L)
        cfg = random_config(shape, N, RngStream(seed, 2 * i))
        g = sample_haar_batch(N, shape.K, RngStream(seed, 2 * i + 1))
        worst_g = max(worst_g, abs(action.action_t(cfg) - action.action_t(action.gauge_transform(cfg, g))))
    ok = worst_id <= 1e-14 and worst_g <= 1e-10
    return ok, f"identity max|t - C(D,2)|={worst_id:.1e} (tol 1e-14); gauge max|dt|={worst_g:.1e} over {n_pairs} pairs (tol 1e-10)"


# 3 -----------------------------------------------------------------------------

def variance_check(shape, N, n_samples, seed):
    batch = concentration.sample_t(shape, N, n_samples, seed)
    x = batch.rescaled
    per_batch = np.array([b.var() for b in np.array_split(x, concentration.N_BATCH_MEANS)])
    se = per_batch.std(ddof=1) / math.sqrt(per_batch.size)
    target = concentration.limit_variance(shape.K, shape.D)
    return abs(x.var() - target) <= 5 * se, x.var(), se, target


def check_second_moment(seed=DEFAULT_SEED, n_samples=100_000):
    ok = True
    parts = []
    for D, L, N in [(2, 4, 6), (3, 2, 4)]:
        good, var, se, target = variance_check(LatticeShape(D, L), N, n_samples, seed)
        ok &= good
        parts.append(f"D={D} L={L} N={N} Var(Nt)={var:.5f}+-{se:.5f} target={target:.5f}")
    shape = LatticeShape(2, 3)
    exact = moments.exact_moment_t(2, shape, 8)
    m2 = moments.leading_moment(2, shape.K, shape.D, exact=True)
    ok &= exact * 64 == m2
    parts.append(f"exact E[t^2]*N^2={exact * 64} m2={m2}")
    return ok, "; ".join(parts)


# 4, 5 ------------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _trend_batch(N, n_samples, seed):
    return concentration.sample_t(LatticeShape(2, 3), N, n_samples, seed)


def check_gaussian_trend(seed=DEFAULT_SEED, n_samples=50_000, sizes=(2, 4, 8, 16)):
    shape = LatticeShape(2, 3)
    m4 = moments.leading_moment(4, shape.K, shape.D)
    ks, dev = [], []
    for N in sizes:
        b = _trend_batch(N, n_samples, seed)
        ks.append(concentration.ks_statistic(b))
        dev.append(abs(np.mean(b.rescaled**4) - m4))
    ks_ok = all(a > b for a, b in zip(ks, ks[1:]))
    dev_ok = all(a > b for a, b in zip(dev, dev[1:]))
    detail = ("KS " + " ".join(f"N={N}:{k:.5f}" for N, k in zip(sizes, ks))
              + f" decreasing={ks_ok}; |m4 dev| " + " ".join(f"N={N}:{d:.2e}" for N, d in zip(sizes, dev))
              + f" decreasing={dev_ok}")
    return ks_ok and dev_ok, detail


def check_odd_moment(seed=DEFAULT_SEED, n_samples=50_000, sizes=(4, 8, 16)):
    shape = LatticeShape(2, 3)
    m2 = moments.leading_moment(2, shape.K, shape.D)
    ok = True
    parts = []
    for N in sizes:
        x3 = _trend_batch(N, n_samples, seed).rescaled ** 3
        se = concentration.batch_means_stderr(x3)
        bound = 5 * se + m2**1.5 / N
        ok &= abs(x3.mean()) <= bound
        parts.append(f"N={N} E[(Nt)^3]={x3.mean():+.2e} bound={bound:.2e}")
    return ok, "; ".join(parts)


# 6 ---------------------------------------------------------------------------------

def random_patterns(count, seed):
    """Index patterns with n <= 2 and N <= 4, half of them forced non-vanishing."""
    gen = RngStream(seed, 77).generator()
    out = []
    for k in range(count):
        N = int(gen.integers(2, 5))
        n = int(gen.integers(1, 3))
        rows = tuple(int(v) for v in gen.integers(0, N, n))
        cols = tuple(int(v) for v in gen.integers(0, N, n))
        if k % 2 == 0:
            p1, p2 = gen.permutation(n), gen.permutation(n)
            crows = tuple(rows[i] for i in p1)
            ccols = tuple(cols[i] for i in p2)
        else:
            crows = tuple(int(v) for v in gen.integers(0, N, n))
            ccols = tuple(int(v) for v in gen.integers(0, N, n))
        out.append((N, weingarten.IndexPattern(rows, cols, crows, ccols)))
    return out


def check_weingarten(seed=DEFAULT_SEED, mc_samples=1_000_000):
    parts = []
    resid = max(weingarten.gram_residual(n, N) for n in range(1, 5) for N in range(n, 17))
    ok = resid <= 1e-10
    parts.append(f"Gram residual max={resid:.1e}")

    worst = 0.0
    for N in range(2, 17):
        t = weingarten.weingarten_table(2, N, exact=False)
        worst = max(worst, abs(t.values[(1, 1)] - 1 / (N * N - 1)), abs(t.values[(2,)] + 1 / (N * (N * N - 1))))
    ok &= worst <= 1e-12
    parts.append(f"n=2 closed-form error={worst:.1e}")

    pats = [
        weingarten.IndexPattern((0, 0), (0, 0), (0, 0), (0, 0)),
        weingarten.IndexPattern((0, 1), (0, 1), (0, 1), (0, 1)),
        weingarten.IndexPattern((0, 1), (0, 1), (0, 1), (1, 0)),
    ]
    ratios = []
    for p in pats:
        gaps = [N**3 * abs(weingarten.haar_integral_exact(p, N) - weingarten.haar_integral_leading(p, N))
                for N in (8, 16, 32)]
        ratios += [float(b / a) if a else (0.0 if b == 0 else math.inf) for a, b in zip(gaps, gaps[1:])]
    ok &= all(r <= 2.0 for r in ratios)
    parts.append("scaled gap ratios " + ",".join(f"{r:.2f}" for r in ratios))

    cases = random_patterns(10, seed)
    worst_z = 0.0
    by_n = {}
    for N, p in cases:
        by_n.setdefault(N, []).append(p)
    for N, plist in sorted(by_n.items()):
        vals = {id(p): [] for p in plist}
        for i, c in enumerate(_chunks(mc_samples, 100_000)):
            u = sample_haar_batch(N, c, RngStream(seed, 5000 + 100 * N + i))
            for p in plist:
                vals[id(p)].append(p.evaluate(u))
        for p in plist:
            v = np.concatenate(vals[id(p)])
            exact = float(weingarten.haar_integral_exact(p, N))
            for part, target in ((v.real, exact), (v.imag, 0.0)):
                se = concentration.batch_means_stderr(part)
                z = abs(part.mean() - target) / se if se > 0 else (0.0 if part.mean() == target else math.inf)
                worst_z = max(worst_z, z)
    ok &= worst_z <= 5
    parts.append(f"MC patterns worst |z|={worst_z:.2f} (10 patterns, {mc_samples} samples)")
    return ok, "; ".join(parts)


# 7 ---------------------------------------------------------------------------------

def check_pairings():
    parts = []
    ok = True
    for l, D, L in [(2, 2, 2), (2, 2, 3), (2, 3, 2), (4, 2, 2)]:
        s = LatticeShape(D, L)
        c, b = pairings.count_pairings_closed(l, s.K, D), pairings.count_pairings_bruteforce(l, s)
        ok &= c == b
        parts.append(f"(l={l},D={D},L={L}) closed={c} brute={b}")
    odd = (pairings.count_pairings_closed(3, 4, 2), pairings.count_pairings_bruteforce(3, LatticeShape(2, 2)))
    ok &= odd == (0, 0)
    parts.append(f"l=3 -> {odd}")
    worst = 0.0
    for K, D in [(4, 2), (9, 2), (8, 3)]:
        for l in (2, 4):
            worst = max(worst, abs(pairings.moment_from_count(l, K, D) - moments.leading_moment(l, K, D)))
    ok &= worst <= 1e-14
    parts.append(f"m_l reconstruction error={worst:.1e}")
    return ok, "; ".join(parts)


# 8 ---------------------------------------------------------------------------------

def check_strong_coupling(K=9, N=4):
    worst = 0.0
    for lam in (2, 3, 4, 8):
        g = thermo.gaussian_free_energy(lam, 2, K, N) / (K * N * N)
        worst = max(worst, abs(g - thermo.reference_free_energy_d2(lam)))
    ok = worst <= 1e-15
    parts = [f"strong branch max|diff|={worst:.1e}"]
    shape = LatticeShape(2, 3)
    for lam in (1.0, 1.5):
        r = thermo.free_energy_report(lam, shape, N)
        rel = abs(r.f_gaussian - r.f_reference) / abs(r.f_reference)
        flagged = r.gaussian_matches_reference is False
        ok &= flagged and rel > 0.01
        parts.append(f"lambda={lam}: gaussian={r.density(r.f_gaussian):.5f} reference={r.density(r.f_reference):.5f} "
                     f"rel diff={rel:.2%} flagged={flagged}")
    return ok, "; ".join(parts)


# 9 ---------------------------------------------------------------------------------

def check_partition_estimator(seed=DEFAULT_SEED, n_samples=1_000_000):
    shape = LatticeShape(2, 2)
    mc = thermo.mc_log_partition(shape, 1, 8.0, n_samples, seed)
    oracle = thermo.u1_torus_log_partition(shape.K, 8.0)
    ok = abs(mc.estimate - oracle) <= 3 * mc.stderr
    big = thermo.mc_log_partition(shape, 1, 1e6, n_samples, seed)
    ok &= abs(big.estimate) <= 1e-4
    return ok, (f"U(1) lambda=8: mc={mc.estimate:.5f}+-{mc.stderr:.5f} oracle={oracle:.5f}; "
                f"lambda=1e6: {big.estimate:.1e}")


# 10 --------------------------------------------------------------------------------

def check_weak_formulas():
    cases = [
        (thermo.weak_scaling_exponent(2, 7, 1), 0.0),
        (thermo.weak_scaling_exponent(2, 4, 2), 6.0),
        (thermo.weak_scaling_exponent(3, 8, 3), 64.0),
        (thermo.weak_coupling_free_energy(1.0, 3, 1, 1), 6.0 + math.log(3)),
    ]
    worst = max(abs(a - b) for a, b in cases)
    lead = all(thermo.weak_coupling_free_energy(lam, 2, K, N) == 2 * N * N * K / lam
               for lam in (0.5, 1.0, 3.0) for K in (4, 9) for N in (1, 3))
    ok = worst <= 1e-12 and lead
    return ok, f"max formula error={worst:.1e}; D=2 equals 2N^2K/lambda: {lead}"


CHECKS = [
    ("1 haar-sampler", check_haar_sampler),
    ("2 action-exactness", check_action_exactness),
    ("3 second-moment-identity", check_second_moment),
    ("4 gaussian-convergence-trend", check_gaussian_trend),
    ("5 odd-moment-suppression", check_odd_moment),
    ("6 weingarten-engine", check_weingarten),
    ("7 pairing-counts", check_pairings),
    ("8 strong-coupling-agreement", check_strong_coupling),
    ("9 partition-estimator", check_partition_estimator),
    ("10 weak-coupling-formulas", check_weak_formulas),
]


def run_check(name, func):
    start = time.perf_counter()
    ok, detail = func()
    return CheckResult(name, bool(ok), detail, time.perf_counter() - start)


def run_checks(selected=None, out=print):
    results = []
    for name, func in CHECKS:
        if selected and name.split()[0] not in selected:
            continue
        res = run_check(name, func)
        out(res.line())
        results.append(res)
    return results
