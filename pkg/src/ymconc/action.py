"""The normalized Wilson action t(U), its Boltzmann weight, and gauge moves."""

import numpy as np

from . import kernels
from .haar import dagger
from .lattice import GaugeConfig, neighbor, plaquette_edge_table


def plaquette_holonomy(config, p):
    """``U^+_{x,nu} U^+_{x+nu,mu} U_{x+mu,nu} U_{x,mu}`` for plaquette ``p``."""
    e0, e1, e2, e3 = p.edges
    u = config.links
    return dagger(u[e3]) @ dagger(u[e2]) @ u[e1] @ u[e0]


def plaquette_traces(links, shape):
    """Complex traces of every plaquette holonomy.

    ``links`` has shape ``(..., K, D, N, N)``; the result has shape
    ``(..., P)`` with plaquettes in :func:`enumerate_plaquettes` order.
    """
    links = np.asarray(links, dtype=np.complex128)
    lead = links.shape[:-4]
    N = links.shape[-1]
    flat = np.ascontiguousarray(links.reshape((-1, shape.n_edges, N, N)))
    tr = kernels.plaquette_traces(flat, plaquette_edge_table(shape))
    return tr.reshape(lead + (shape.n_plaquettes,))


def action_t_batch(links, shape):
    """t for a stack of configurations given as raw link arrays."""
    links = np.asarray(links)
    N = links.shape[-1]
    # np.sum reduces pairwise along the contiguous plaquette axis
    return np.sum(plaquette_traces(links, shape).real, axis=-1) / (shape.K * N)


def action_t(config):
    """t(U) = (1/K) sum_plaquettes (1/N) Re Tr(holonomy)."""
    return float(action_t_batch(config.links, config.shape))


def wilson_weight(config, lam):
    """exp((2 N^2 K / lambda) t); lambda is the 't Hooft coupling."""
    return float(np.exp(wilson_exponent(action_t(config), lam, config.shape.K, config.N)))


def wilson_exponent(t, lam, K, N):
    if not lam > 0:
        raise ValueError(f"coupling lambda must be positive, got {lam!r}")
    return 2.0 * N * N * K / lam * np.asarray(t, dtype=float)


def gauge_transform(config, g):
    """Apply ``U_{x,mu} -> g_{x+mu} U_{x,mu} g_x^+`` to every link.

    ``g`` has shape ``(K, N, N)``, one unitary per site.
    """
    g = np.asarray(g, dtype=np.complex128)
    shape, N = config.shape, config.N
    if g.shape != (shape.K, N, N):
        raise ValueError(f"gauge transform must have shape {(shape.K, N, N)}, got {g.shape}")
    new = np.empty_like(config.links)
    sites = np.arange(shape.K)
    for mu in range(shape.D):
        fwd = np.array([neighbor(int(x), mu, shape) for x in sites])
        new[:, mu] = g[fwd] @ config.links[:, mu] @ dagger(g)
    return config.replace_links(new)


def max_action(D):
    """Largest attainable t, reached by the identity configuration."""
    return D * (D - 1) / 2
