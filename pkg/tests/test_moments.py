import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ymconc.lattice import LatticeShape
from ymconc.moments import (
    balanced_tuples,
    double_factorial,
    evaluate_terms,
    exact_moment_report,
    exact_moment_t,
    leading_moment,
    moment_terms,
    oriented_factors,
    terms_from_factors,
)


def test_double_factorial():
    assert [double_factorial(n) for n in range(-1, 8)] == [1, 1, 1, 2, 3, 8, 15, 48, 105]


def test_leading_moment_examples():
    assert leading_moment(2, 9, 2) == pytest.approx(1 / 18)
    assert leading_moment(4, 4, 2, exact=True) == Fraction(3, 64)
    assert leading_moment(3, 9, 2) == 0.0
    assert leading_moment(0, 9, 3) == 1.0


@given(st.integers(1, 50), st.integers(2, 5), st.integers(1, 4))
def test_leading_moment_gaussian(K, D, h):
    var = leading_moment(2, K, D, exact=True)
    assert leading_moment(2 * h, K, D, exact=True) == double_factorial(2 * h - 1) * var**h


@pytest.mark.parametrize("D, L", [(2, 2), (2, 3), (3, 2)])
@pytest.mark.parametrize("N", [4, 6, 8])
def test_second_moment_exact(D, L, N):
    shape = LatticeShape(D, L)
    # distinct plaquettes are uncorrelated and E|Tr H|^2 = 1
    assert exact_moment_t(2, shape, N) * N * N == leading_moment(2, shape.K, D, exact=True)


def test_second_moment_value():
    assert exact_moment_t(2, LatticeShape(2, 3), 4) == Fraction(1, 288)


@pytest.mark.parametrize("D, L", [(2, 2), (2, 3), (3, 2)])
def test_odd_moments_vanish(D, L):
    shape = LatticeShape(D, L)
    assert exact_moment_t(1, shape, 4) == 0
    assert exact_moment_t(3, shape, 6) == 0


def test_fourth_moment_2x2_torus():
    # every plaquette in one orientation gives E prod Tr = N^-4; 48 such ordered tuples
    shape = LatticeShape(2, 2)
    for N in (8, 10, 12):
        got = exact_moment_t(4, shape, N) * N**4
        assert got == leading_moment(4, 4, 2, exact=True) + Fraction(3, 256) / N**4


def test_float_matches_exact():
    shape = LatticeShape(2, 3)
    assert exact_moment_t(2, shape, 5, exact=False) == pytest.approx(float(exact_moment_t(2, shape, 5)), rel=1e-12)


def test_relabel_invariance():
    # permuting coordinate axes together with shuffling the factor list leaves the histogram unchanged
    shape = LatticeShape(3, 2)
    perm = (2, 0, 1)
    emap = {}
    for site in range(shape.K):
        c = shape.coords(site)
        nc = tuple(c[perm.index(k)] for k in range(3))
        for mu in range(3):
            emap[shape.edge_index(site, mu)] = shape.edge_index(shape.site_index(nc), perm[mu])
    factors = [tuple((emap[e], d) for e, d in f) for f in oriented_factors(shape)]
    random.Random(3).shuffle(factors)
    for l in (2, 3):
        assert terms_from_factors(l, shape, factors) == moment_terms(l, 3, 2)


def test_balanced_tuple_count():
    # at l = 2 only a plaquette paired with its own reverse balances
    shape = LatticeShape(2, 3)
    assert len(balanced_tuples(2, shape)) == 2 * shape.n_plaquettes
    assert balanced_tuples(0, shape) == [()]


def test_terms_evaluate_for_any_n():
    terms = moment_terms(2, 2, 3)
    for N in (4, 7, 11):
        assert evaluate_terms(terms, N) == 2 * 9


@pytest.mark.parametrize("l, D, L, N", [(5, 2, 2, 10), (4, 2, 3, 8), (2, 2, 2, 3), (-1, 2, 2, 4)])
def test_guards(l, D, L, N):
    with pytest.raises(ValueError):
        exact_moment_t(l, LatticeShape(D, L), N)


def test_report():
    r = exact_moment_report(2, LatticeShape(2, 3), 4)
    assert r.kind == "exact" and r.error == 0.0
    assert r.value == pytest.approx(r.target)
    assert np.isfinite(r.value)
