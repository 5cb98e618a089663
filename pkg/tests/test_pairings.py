import pytest
from hypothesis import given, strategies as st

from ymconc.lattice import LatticeShape
from ymconc.moments import leading_moment
from ymconc.pairings import (
    count_pairings_bruteforce,
    count_pairings_closed,
    moment_from_count,
    oriented_plaquettes,
)


def test_worked_examples():
    assert count_pairings_closed(2, 4, 2) == 8
    assert count_pairings_closed(4, 4, 2) == 192
    assert count_pairings_closed(3, 4, 2) == 0
    assert count_pairings_closed(0, 4, 2) == 1


@pytest.mark.parametrize("l", [0, 1, 2, 3, 4])
def test_bruteforce_matches_closed_d2_l2(l):
    shape = LatticeShape(2, 2)
    assert count_pairings_bruteforce(l, shape) == count_pairings_closed(l, shape.K, shape.D)


@pytest.mark.parametrize("D, L, l", [(2, 3, 2), (2, 3, 4), (3, 2, 2), (3, 2, 4), (2, 4, 2)])
def test_bruteforce_matches_closed(D, L, l):
    shape = LatticeShape(D, L)
    assert count_pairings_bruteforce(l, shape) == count_pairings_closed(l, shape.K, shape.D)


def test_enumeration_limit():
    with pytest.raises(ValueError):
        count_pairings_bruteforce(6, LatticeShape(3, 3))


def test_oriented_plaquettes():
    ops = oriented_plaquettes(LatticeShape(2, 2))
    assert len(ops) == 8
    assert {o.orientation for o in ops} == {1, -1}


@given(st.integers(0, 8), st.integers(1, 100), st.integers(2, 6))
def test_moment_from_count_is_leading_moment(l, K, D):
    assert moment_from_count(l, K, D) == pytest.approx(leading_moment(l, K, D), rel=1e-12, abs=0)
