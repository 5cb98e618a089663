"""Counting the leading-order terms of E[t^l].

A leading term groups the l factors of t^l into pairs, each pair being one
plaquette taken once with each orientation.  The closed form multiplies the
number of ways to pair positions, orientation choices, site choices and
plane choices.  The brute-force count enumerates ordered tuples of oriented
plaquettes and weights each by the number of admissible position pairings,
so that tuples repeating a plaquette are counted as often as the closed form
counts them.
"""

from math import comb
from typing import NamedTuple

from . import kernels
from .lattice import PlaquetteId, enumerate_plaquettes
from .moments import double_factorial

ENUMERATION_LIMIT = 10**7


class OrientedPlaquette(NamedTuple):
    plaquette: PlaquetteId
    orientation: int  # +1 or -1


def oriented_plaquettes(shape):
    return [OrientedPlaquette(p, o) for p in enumerate_plaquettes(shape) for o in (+1, -1)]


def count_pairings_closed(l, K, D):
    """(l-1)!! * 2^(l/2) * K^(l/2) * C(D,2)^(l/2) for even l, else 0."""
    if l < 0:
        raise ValueError("l must be non-negative")
    if l % 2:
        return 0
    h = l // 2
    return double_factorial(l - 1) * 2**h * K**h * comb(D, 2) ** h


def count_pairings_bruteforce(l, shape):
    if l < 0:
        raise ValueError("l must be non-negative")
    n_or = 2 * shape.n_plaquettes
    if n_or**l > ENUMERATION_LIMIT:
        raise ValueError(f"{n_or}^{l} tuples exceed the enumeration limit {ENUMERATION_LIMIT}")
    return int(kernels.count_matchings(shape.n_plaquettes, l))


def moment_from_count(l, K, D):
    """m_l rebuilt from the pairing count: every leading term is worth (2K)^-l."""
    return count_pairings_closed(l, K, D) / (2 * K) ** l
