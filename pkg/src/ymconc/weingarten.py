"""Haar integrals of polynomials in U(N) matrix entries.

Permutations are tuples ``p`` with ``p[k]`` the image of ``k``.  The exact
integral of ``U_{i_1 j_1} ... U_{i_n j_n} conj(U_{i'_1 j'_1}) ... conj(U_{i'_n j'_n})``
is ``sum_{sigma, tau} prod_k delta(i_k, i'_{sigma(k)}) delta(j_k, j'_{tau(k)})
Wg(sigma tau^{-1}, N)``.  Keeping only ``sigma == tau`` with ``Wg ~ N^{-n}``
gives the leading large-N term.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np

MAX_DEGREE = 6


# -- permutations -----------------------------------------------------------

def identity(n):
    return tuple(range(n))


def compose(a, b):
    """(a o b)(k) = a(b(k))."""
    return tuple(a[b[k]] for k in range(len(b)))


def inverse(a):
    inv = [0] * len(a)
    for k, v in enumerate(a):
        inv[v] = k
    return tuple(inv)


def cycles(a):
    seen = [False] * len(a)
    out = []
    for start in range(len(a)):
        if seen[start]:
            continue
        cyc = []
        k = start
        while not seen[k]:
            seen[k] = True
            cyc.append(k)
            k = a[k]
        out.append(tuple(cyc))
    return out


def n_cycles(a):
    return len(cycles(a))


def cycle_type(a):
    """Partition of n given by cycle lengths, sorted decreasingly."""
    return tuple(sorted((len(c) for c in cycles(a)), reverse=True))


@lru_cache(maxsize=None)
def permutations(n):
    """All of S_n in lexicographic order; the identity comes first."""
    return tuple(itertools.permutations(range(n)))


@lru_cache(maxsize=None)
def partitions(n):
    """Cycle types of S_n, identity type ``(1,)*n`` first."""
    types = sorted({cycle_type(p) for p in permutations(n)}, key=lambda c: (len(c), c), reverse=True)
    return tuple(types)


def _check_degree(n):
    if int(n) != n or n < 1:
        raise ValueError(f"degree must be a positive integer, got {n!r}")
    if n > MAX_DEGREE:
        raise ValueError(f"degree {n} exceeds the cap {MAX_DEGREE} (Gram matrix would be {factorial(n)}^2)")


# -- Gram matrix and Weingarten function -------------------------------------

def gram_matrix(n, N):
    """``G[s, t] = N ** n_cycles(s t^{-1})`` over :func:`permutations` order."""
    _check_degree(n)
    perms = permutations(n)
    cyc = np.array([[n_cycles(compose(s, inverse(t))) for t in perms] for s in perms])
    if isinstance(N, (int, np.integer)):
        return np.array([[int(N) ** int(c) for c in row] for row in cyc], dtype=object)
    return float(N) ** cyc


def _solve_fractions(a, b):
    """Gauss-Jordan elimination over the rationals."""
    m = len(a)
    aug = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(a, b)]
    for col in range(m):
        piv = next((r for r in range(col, m) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(m):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[-1] for row in aug]


@lru_cache(maxsize=None)
def _class_system(n):
    """Integer system for Wg restricted to class functions.

    Row ``a`` (representative of cycle type a) lists, per cycle type c and
    per cycle count k, how many tau of type c give n_cycles(sigma_a tau^{-1}) = k.
    """
    types = partitions(n)
    where = {c: i for i, c in enumerate(types)}
    reps = {}
    for p in permutations(n):
        reps.setdefault(cycle_type(p), p)
    counts = np.zeros((len(types), len(types), n + 1), dtype=np.int64)
    for a, c in enumerate(types):
        s = reps[c]
        for t in permutations(n):
            counts[a, where[cycle_type(t)], n_cycles(compose(s, inverse(t)))] += 1
    return types, counts


@dataclass(frozen=True)
class WeingartenTable:
    """Wg(., N) on S_n, stored per cycle type."""

    n: int
    N: int
    values: dict
    exact: bool

    def __call__(self, perm):
        return self.values[cycle_type(perm)]

    def vector(self):
        return [self(p) for p in permutations(self.n)]


@lru_cache(maxsize=256)
def weingarten_table(n, N, exact=True):
    """Solve ``sum_tau G(sigma, tau) Wg(tau) = [sigma == id]``.

    With ``exact=True`` the solution is a dict of :class:`fractions.Fraction`
    (N must then be an integer); otherwise floats from a dense solve.
    Refuses ``N < n``, where the Gram matrix is singular.
    """
    _check_degree(n)
    if N < n:
        raise ValueError(f"Weingarten table needs N >= n (got N={N}, n={n}); Gram matrix is singular")
    types, counts = _class_system(n)
    if exact:
        if int(N) != N:
            raise ValueError("exact tables need an integer N")
        N = int(N)
        powers = [N ** k for k in range(n + 1)]
        a = [[sum(int(cnt[k]) * powers[k] for k in range(n + 1)) for cnt in row] for row in counts]
        sol = _solve_fractions(a, [1] + [0] * (len(types) - 1))
    else:
        powers = float(N) ** np.arange(n + 1)
        a = counts @ powers
        rhs = np.zeros(len(types))
        rhs[0] = 1.0
        sol = [float(v) for v in np.linalg.solve(a, rhs)]
    return WeingartenTable(n, N, dict(zip(types, sol)), exact)


def gram_residual(n, N):
    """``max |G wg - e_id|`` with G the full n! x n! Gram matrix (float)."""
    g = gram_matrix(n, float(N))
    wg = np.array(weingarten_table(n, N, exact=False).vector(), dtype=float)
    rhs = np.zeros(len(wg))
    rhs[0] = 1.0
    return float(np.max(np.abs(g @ wg - rhs)))


# -- integrals of monomials ---------------------------------------------------

@dataclass(frozen=True)
class IndexPattern:
    """Monomial ``prod_k U[rows[k], cols[k]] * prod_k conj(U[conj_rows[k], conj_cols[k]])``."""

    rows: tuple
    cols: tuple
    conj_rows: tuple
    conj_cols: tuple

    def __post_init__(self):
        if len(self.rows) != len(self.cols) or len(self.conj_rows) != len(self.conj_cols):
            raise ValueError("row and column tuples must have equal length")

    @property
    def n(self):
        return len(self.rows)

    @property
    def m(self):
        return len(self.conj_rows)

    def evaluate(self, u):
        """The monomial evaluated on a matrix or a stack of matrices."""
        u = np.asarray(u)
        out = np.ones(u.shape[:-2], dtype=np.complex128)
        for i, j in zip(self.rows, self.cols):
            out = out * u[..., i, j]
        for i, j in zip(self.conj_rows, self.conj_cols):
            out = out * np.conj(u[..., i, j])
        return out


def _matching_perms(a, b):
    """Permutations s with a[k] == b[s(k)] for all k."""
    return [s for s in permutations(len(a)) if all(a[k] == b[s[k]] for k in range(len(a)))]


def _check_pattern(pattern, N):
    for idx in (pattern.rows, pattern.cols, pattern.conj_rows, pattern.conj_cols):
        if any(not 0 <= i < N for i in idx):
            raise ValueError(f"index out of range for N={N}")


def haar_integral_exact(pattern, N, exact=True):
    """Exact Haar average of the monomial; a Fraction when ``exact``."""
    if pattern.n != pattern.m:
        return Fraction(0) if exact else 0.0
    n = pattern.n
    if n == 0:
        return Fraction(1) if exact else 1.0
    _check_degree(n)
    _check_pattern(pattern, N)
    table = weingarten_table(n, N, exact)
    sig = _matching_perms(pattern.rows, pattern.conj_rows)
    tau = _matching_perms(pattern.cols, pattern.conj_cols)
    total = Fraction(0) if exact else 0.0
    for s in sig:
        for t in tau:
            total += table(compose(s, inverse(t)))
    return total


def haar_integral_leading(pattern, N, exact=True):
    """Leading large-N term: ``N^{-n}`` times the number of sigma matching rows and columns together."""
    if pattern.n != pattern.m:
        return Fraction(0) if exact else 0.0
    n = pattern.n
    if n == 0:
        return Fraction(1) if exact else 1.0
    _check_degree(n)
    _check_pattern(pattern, N)
    count = sum(
        1 for s in permutations(n)
        if all(pattern.rows[k] == pattern.conj_rows[s[k]] and pattern.cols[k] == pattern.conj_cols[s[k]]
               for k in range(n))
    )
    return Fraction(count, N ** n) if exact else count / float(N) ** n
