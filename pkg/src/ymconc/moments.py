"""Moments of the pushforward of Haar measure under t.

``leading_moment`` is the Gaussian limit of the rescaled variable N t.
``exact_moment_t`` computes E[t^l] exactly for small l by expanding

    t^l = (2 K N)^{-l} sum over l-tuples of oriented plaquettes of prod Tr(holonomy)

and integrating every edge with the exact Weingarten function.  After the
Kronecker deltas are applied each term is ``prod_e Wg_e * N^{loops}``, so the
engine records a histogram over (Weingarten classes, loop count) once per
lattice and evaluates it for any N afterwards.
"""

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .lattice import LatticeShape, enumerate_plaquettes
from .weingarten import compose, cycle_type, inverse, permutations, weingarten_table


def double_factorial(n):
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def leading_moment(l, K, D, exact=False):
    """l-th moment of the limit Gaussian of N t: (l-1)!! (D(D-1)/(4K))^(l/2), 0 for odd l."""
    if l < 0:
        raise ValueError("moment order must be non-negative")
    if l % 2:
        return Fraction(0) if exact else 0.0
    var = Fraction(D * (D - 1), 4 * K)
    val = double_factorial(l - 1) * var ** (l // 2)
    return val if exact else float(val)


@dataclass(frozen=True)
class MomentReport:
    l: int
    value: float
    error: float
    N: int
    D: int
    L: int
    K: int
    kind: str  # "exact" | "leading" | "empirical"
    target: float | None = None


# -- oriented plaquettes as factor lists ---------------------------------------

def oriented_factors(shape):
    """For each oriented plaquette, its trace as a list of (edge, daggered).

    Index 2p is Tr(H_p) and 2p+1 is Tr(H_p^+) where
    H_p = U_3^+ U_2^+ U_1 U_0 in the plaquette's edge order.
    """
    out = []
    for p in enumerate_plaquettes(shape):
        e = [shape.edge_index(*x) for x in p.edges]
        out.append(((e[3], True), (e[2], True), (e[1], False), (e[0], False)))
        out.append(((e[0], True), (e[1], True), (e[2], False), (e[3], False)))
    return out


def _signed_incidence(factors, n_edges):
    v = np.zeros((len(factors), n_edges), dtype=np.int64)
    for o, fac in enumerate(factors):
        for e, dag in fac:
            v[o, e] += -1 if dag else 1
    return v


def balanced_tuples(l, shape, factors=None):
    """Ordered l-tuples of oriented plaquettes where every edge carries as many U as U^+.

    Tuples failing this vanish identically under Haar integration.  The last
    position is found by hash lookup of the required incidence vector.
    """
    if factors is None:
        factors = oriented_factors(shape)
    inc = _signed_incidence(factors, shape.n_edges)
    if l == 0:
        return [()]
    lookup = {}
    for o in range(len(factors)):
        lookup.setdefault(inc[o].tobytes(), []).append(o)
    out = []
    for head in itertools.product(range(len(factors)), repeat=l - 1):
        need = -inc[list(head)].sum(axis=0) if head else np.zeros(shape.n_edges, dtype=np.int64)
        for last in lookup.get(need.tobytes(), ()):
            out.append(head + (last,))
    return out


def _tuple_terms(tup, factors, hist):
    """Add the (class key, loops) histogram of one balanced tuple into ``hist``."""
    # index variable 4*i + k sits between factor k-1 and k of trace i
    ups, downs = {}, {}
    for i, o in enumerate(tup):
        for k, (e, dag) in enumerate(factors[o]):
            r, c = 4 * i + k, 4 * i + (k + 1) % 4
            if dag:
                # (U^+)[r, c] = conj(U[c, r])
                downs.setdefault(e, []).append((c, r))
            else:
                ups.setdefault(e, []).append((r, c))
    n_vars = 4 * len(tup)

    fixed = []
    choice_edges = []  # (n, list of (class, merges)) per edge with n >= 2
    for e, u in ups.items():
        d = downs[e]
        n = len(u)
        if n == 1:
            fixed.append((u[0][0], d[0][0]))
            fixed.append((u[0][1], d[0][1]))
            continue
        alts = []
        for s in permutations(n):
            for t in permutations(n):
                merges = [(u[k][0], d[s[k]][0]) for k in range(n)]
                merges += [(u[k][1], d[t[k]][1]) for k in range(n)]
                alts.append((cycle_type(compose(s, inverse(t))), merges))
        choice_edges.append((n, alts))
    n_single = sum(1 for v in ups.values() if len(v) == 1)

    if not choice_edges:
        loops = kernels.count_loops_python(n_vars, fixed)
        hist[((1, (1,)),) * n_single, loops] += 1
        return

    radices = np.array([len(alts) for _, alts in choice_edges], dtype=np.int64)
    width = int(radices.max())
    offsets = np.zeros((len(choice_edges), width + 1), dtype=np.int64)
    flat = []
    for e, (_, alts) in enumerate(choice_edges):
        for c, (_, merges) in enumerate(alts):
            offsets[e, c] = len(flat)
            flat.extend(merges)
            offsets[e, c + 1] = len(flat)
    fixed_arr = np.array(fixed, dtype=np.int64).reshape(-1, 2)
    flat_arr = np.array(flat, dtype=np.int64).reshape(-1, 2)
    loops = kernels.loop_histogram(n_vars, fixed_arr, flat_arr, offsets, radices)

    for r, combo in enumerate(itertools.product(*[range(int(x)) for x in radices])):
        key = [(1, (1,))] * n_single
        for e, c in enumerate(combo):
            n, alts = choice_edges[e]
            key.append((n, alts[c][0]))
        hist[tuple(sorted(key)), int(loops[r])] += 1


def check_moment_guard(l, shape, N):
    if l < 0:
        raise ValueError("moment order must be non-negative")
    if l > 4 or (l == 4 and (shape.D, shape.L) != (2, 2)):
        raise ValueError(f"exact moments limited to l <= 3 (l = 4 only on D=2, L=2); got l={l}, D={shape.D}, L={shape.L}")
    if N < 2 * l:
        raise ValueError(f"exact moment of order {l} needs N >= {2 * l}, got N={N}")


def terms_from_factors(l, shape, factors):
    hist = Counter()
    for tup in balanced_tuples(l, shape, factors):
        _tuple_terms(tup, factors, hist)
    return dict(hist)


@lru_cache(maxsize=None)
def moment_terms(l, D, L):
    """Histogram ``{(class key, loops): count}`` for E[(2KN t)^l] on the lattice."""
    shape = LatticeShape(D, L)
    return terms_from_factors(l, shape, oriented_factors(shape))


def evaluate_terms(terms, N, exact=True):
    wg_cache = {}

    def wg(n, ctype):
        if (n, ctype) not in wg_cache:
            wg_cache[n, ctype] = weingarten_table(n, N, exact).values[ctype]
        return wg_cache[n, ctype]

    total = Fraction(0) if exact else 0.0
    for (key, loops), count in terms.items():
        term = Fraction(count) if exact else float(count)
        for n, ctype in key:
            term *= wg(n, ctype)
        total += term * (N ** loops if exact else float(N) ** loops)
    return total


def exact_moment_t(l, shape, N, exact=True):
    """E[t^l] under the product Haar measure, exactly (Fraction) or as float."""
    check_moment_guard(l, shape, N)
    terms = moment_terms(l, shape.D, shape.L)
    raw = evaluate_terms(terms, N, exact)
    scale = Fraction(1, (2 * shape.K * N) ** l) if exact else 1.0 / float(2 * shape.K * N) ** l
    return raw * scale


def exact_moment_report(l, shape, N):
    val = exact_moment_t(l, shape, N)
    return MomentReport(l, float(val), 0.0, N, shape.D, shape.L, shape.K, "exact",
                        leading_moment(l, shape.K, shape.D) / N ** l)
