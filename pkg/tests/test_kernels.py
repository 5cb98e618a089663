import numpy as np
import pytest

from ymconc import _accel, kernels
from ymconc.lattice import LatticeShape, plaquette_edge_table
from ymconc.haar import RngStream, ginibre, sample_haar_batch
from ymconc.moments import moment_terms, oriented_factors, terms_from_factors

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


def test_backend_reported():
    assert _accel.backend() in ("numba", "numpy")


@needs_numba
@pytest.mark.parametrize("N", [1, 2, 5, 16])
def test_orthonormalize_backends_agree(N):
    g = ginibre(np.random.default_rng(N), (40,), N)
    a = kernels.orthonormalize_numpy(g)
    b = kernels.orthonormalize_numba(g)
    assert np.allclose(a, b, atol=1e-12)


@needs_numba
def test_plaquette_traces_backends_agree():
    shape = LatticeShape(3, 2)
    links = sample_haar_batch(3, (5, shape.n_edges), RngStream(1))
    table = plaquette_edge_table(shape)
    a = kernels.plaquette_traces_numpy(links, table)
    b = kernels.plaquette_traces_numba(links, table)
    assert np.allclose(a, b, atol=1e-12)


@needs_numba
@pytest.mark.parametrize("P, l", [(1, 2), (4, 4), (9, 4), (2, 5)])
def test_count_matchings_backends_agree(P, l):
    assert kernels.count_matchings_numpy(P, l) == kernels.count_matchings_numba(P, l)


@needs_numba
def test_loop_histogram_backends_agree(monkeypatch):
    shape = LatticeShape(2, 2)
    ref = moment_terms(4, 2, 2)
    monkeypatch.setattr(kernels, "loop_histogram", kernels.loop_histogram_python)
    assert terms_from_factors(4, shape, oriented_factors(shape)) == ref


def test_count_loops():
    assert kernels.count_loops_python(4, [(0, 1), (2, 3)]) == 2
    assert kernels.count_loops_python(3, []) == 3
    assert kernels.count_loops_python(3, [(0, 1), (1, 2), (2, 0)]) == 1
