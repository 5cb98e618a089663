import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ymconc.action import (
    action_t,
    gauge_transform,
    plaquette_holonomy,
    wilson_exponent,
    wilson_weight,
)
from ymconc.concentration import batch_means_stderr, sample_t
from ymconc.haar import RngStream, dagger, sample_haar_batch, unitarity_residual
from ymconc.lattice import LatticeShape, enumerate_plaquettes, identity_config, random_config


@pytest.mark.parametrize("D, L, N", [(2, 2, 1), (2, 4, 3), (3, 2, 2), (4, 2, 2)])
def test_identity_action(D, L, N):
    assert abs(action_t(identity_config(LatticeShape(D, L), N)) - D * (D - 1) / 2) <= 1e-14


def test_identity_holonomy():
    cfg = identity_config(LatticeShape(2, 3), 3)
    for p in enumerate_plaquettes(cfg.shape):
        assert np.array_equal(plaquette_holonomy(cfg, p), np.eye(3))


def test_holonomy_literal_order():
    cfg = random_config(LatticeShape(2, 2), 2, RngStream(3))
    p = enumerate_plaquettes(cfg.shape)[1]
    (x, mu), (xm, nu), (xn, _), _ = p.edges
    U = cfg.links
    want = dagger(U[x, nu]) @ dagger(U[xn, mu]) @ U[xm, nu] @ U[x, mu]
    assert np.allclose(plaquette_holonomy(cfg, p), want, atol=1e-14)
    assert unitarity_residual(want) <= 1e-10


def test_global_phase_invariance():
    cfg = random_config(LatticeShape(2, 2), 2, RngStream(3))
    rot = cfg.replace_links(cfg.links * np.exp(0.7j))
    for p in enumerate_plaquettes(cfg.shape):
        assert np.allclose(plaquette_holonomy(cfg, p), plaquette_holonomy(rot, p), atol=1e-14)


def test_action_bound_and_mean_zero():
    batch = sample_t(LatticeShape(2, 3), 3, 100_000, 31)
    assert np.all(np.abs(batch.values) <= 1)
    assert abs(batch.values.mean()) <= 5 * batch_means_stderr(batch.values)


def test_wilson_weight_examples():
    cfg = identity_config(LatticeShape(2, 2), 2)
    assert wilson_weight(cfg, 2.0) == pytest.approx(np.exp(16.0), rel=1e-14)
    assert wilson_exponent(0.0, 3.0, 9, 4) == 0.0
    t = np.linspace(-1, 1, 11)
    assert np.all(np.diff(wilson_exponent(t, 1.5, 4, 2)) > 0)
    with pytest.raises(ValueError):
        wilson_weight(cfg, 0.0)


def test_gauge_identity_and_constant():
    shape = LatticeShape(2, 3)
    cfg = random_config(shape, 3, RngStream(2))
    same = gauge_transform(cfg, np.broadcast_to(np.eye(3), (shape.K, 3, 3)))
    assert np.allclose(same.links, cfg.links)
    v = sample_haar_batch(3, (), RngStream(3))
    ident = gauge_transform(identity_config(shape, 3), np.broadcast_to(v, (shape.K, 3, 3)))
    assert abs(action_t(ident) - 1.0) <= 1e-12


def test_gauge_rejects_bad_shape():
    cfg = identity_config(LatticeShape(2, 2), 2)
    with pytest.raises(ValueError):
        gauge_transform(cfg, np.zeros((4, 3, 3)))


@given(seed=st.integers(0, 2**32), combo=st.sampled_from(list(itertools.product((2, 3), (2, 3), (2, 3)))))
@settings(max_examples=30, deadline=None)
def test_gauge_invariance(seed, combo):
    D, L, N = combo
    shape = LatticeShape(D, L)
    cfg = random_config(shape, N, RngStream(seed, 0))
    g = sample_haar_batch(N, shape.K, RngStream(seed, 1))
    out = gauge_transform(cfg, g)
    assert abs(action_t(cfg) - action_t(out)) <= 1e-10
    assert abs(action_t(out)) <= D * (D - 1) / 2


def test_reversal_symmetry():
    # swapping U and U^+ on every link and flipping each plaquette's orientation leaves t unchanged
    shape = LatticeShape(3, 2)
    cfg = random_config(shape, 2, RngStream(6))
    conj = cfg.replace_links(np.conj(cfg.links))
    assert abs(action_t(cfg) - action_t(conj)) <= 1e-13
