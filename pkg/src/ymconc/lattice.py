"""Periodic hypercubic lattices and gauge-field configurations.

Sites are numbered row-major with coordinate 0 varying fastest:
``site = sum_k x_k * L**k``.  Edge ``(site, mu)`` has flat index
``site * D + mu`` and links are stored as an array of shape ``(K, D, N, N)``.
"""

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .haar import RngStream, is_unitary, sample_haar_batch, unitarity_residual, UNITARITY_TOL

CONFIG_FORMAT = "ymconc.gauge-config"
CONFIG_VERSION = 1


@dataclass(frozen=True)
class LatticeShape:
    D: int
    L: int

    def __post_init__(self):
        if int(self.D) != self.D or self.D < 2:
            raise ValueError(f"dimension D must be an integer >= 2, got {self.D!r}")
        # L = 1 would make a plaquette run over the same edge twice
        if int(self.L) != self.L or self.L < 2:
            raise ValueError(f"extent L must be an integer >= 2, got {self.L!r}")

    @property
    def K(self):
        return self.L ** self.D

    @property
    def n_edges(self):
        return self.K * self.D

    @property
    def n_plaquettes(self):
        return self.K * self.D * (self.D - 1) // 2

    @property
    def n_planes(self):
        return self.D * (self.D - 1) // 2

    def coords(self, site):
        return tuple((site // self.L ** k) % self.L for k in range(self.D))

    def site_index(self, coords):
        if len(coords) != self.D:
            raise ValueError(f"expected {self.D} coordinates, got {len(coords)}")
        return sum((int(c) % self.L) * self.L ** k for k, c in enumerate(coords))

    def edge_index(self, site, mu):
        return site * self.D + mu


class EdgeId(NamedTuple):
    site: int
    mu: int


class PlaquetteId(NamedTuple):
    site: int
    mu: int
    nu: int
    # (x, mu), (x+mu, nu), (x+nu, mu), (x, nu)
    edges: tuple


def neighbor(site, mu, shape, step=1):
    """Site displaced by ``step`` in direction ``mu`` with periodic wrap."""
    if not 0 <= mu < shape.D:
        raise ValueError(f"direction {mu} out of range for D={shape.D}")
    stride = shape.L ** mu
    x = (site // stride) % shape.L
    return site + (((x + step) % shape.L) - x) * stride


def enumerate_edges(shape):
    return [EdgeId(s, mu) for s in range(shape.K) for mu in range(shape.D)]


def enumerate_plaquettes(shape):
    """All ``K * D(D-1)/2`` plaquettes, ordered by site then by (mu, nu)."""
    out = []
    for x in range(shape.K):
        for mu in range(shape.D):
            for nu in range(mu + 1, shape.D):
                edges = (
                    EdgeId(x, mu),
                    EdgeId(neighbor(x, mu, shape), nu),
                    EdgeId(neighbor(x, nu, shape), mu),
                    EdgeId(x, nu),
                )
                out.append(PlaquetteId(x, mu, nu, edges))
    return out


@lru_cache(maxsize=None)
def _plaquette_table(shape):
    table = np.array(
        [[shape.edge_index(*e) for e in p.edges] for p in enumerate_plaquettes(shape)],
        dtype=np.int64,
    )
    table.setflags(write=False)
    return table


def plaquette_edge_table(shape):
    """Read-only ``(P, 4)`` array of flat edge indices, one row per plaquette."""
    return _plaquette_table(shape)


@dataclass(frozen=True, eq=False)
class GaugeConfig:
    """One unitary per directed edge; ``links[site, mu]`` is ``U_{x, mu}``."""

    shape: LatticeShape
    N: int
    links: np.ndarray = field(repr=False)
    seed: int | None = None
    stream_id: int | None = None

    def __post_init__(self):
        links = np.array(self.links, dtype=np.complex128)
        want = (self.shape.K, self.shape.D, self.N, self.N)
        if links.shape != want:
            raise ValueError(f"links must have shape {want}, got {links.shape}")
        links.setflags(write=False)
        object.__setattr__(self, "links", links)

    def link(self, site, mu):
        return self.links[site, mu]

    def flat_links(self):
        return self.links.reshape(self.shape.n_edges, self.N, self.N)

    def is_unitary(self, tol=UNITARITY_TOL):
        return is_unitary(self.links, tol)

    def unitarity_residual(self):
        return unitarity_residual(self.links)

    def replace_links(self, links):
        return GaugeConfig(self.shape, self.N, links, self.seed, self.stream_id)


def identity_config(shape, N):
    links = np.broadcast_to(np.eye(N, dtype=np.complex128), (shape.K, shape.D, N, N))
    return GaugeConfig(shape, N, links)


def random_config(shape, N, rng):
    """Every link drawn independently from Haar measure on U(N)."""
    links = sample_haar_batch(N, (shape.K, shape.D), rng)
    seed = rng.seed if isinstance(rng, RngStream) else None
    stream = rng.stream_id if isinstance(rng, RngStream) else None
    return GaugeConfig(shape, N, links, seed, stream)


def config_to_dict(config):
    flat = np.empty(config.links.size * 2)
    c = config.links.reshape(-1)
    flat[0::2] = c.real
    flat[1::2] = c.imag
    return {
        "format": CONFIG_FORMAT,
        "version": CONFIG_VERSION,
        "D": config.shape.D,
        "L": config.shape.L,
        "N": config.N,
        "seed": config.seed,
        "stream_id": config.stream_id,
        "link_order": "site,mu,row,col",
        "links": flat.tolist(),
    }


def config_from_dict(data):
    if data.get("format") != CONFIG_FORMAT:
        raise ValueError(f"not a gauge config document (format={data.get('format')!r})")
    if data.get("version") != CONFIG_VERSION:
        raise ValueError(f"unsupported gauge config version {data.get('version')!r}")
    shape = LatticeShape(int(data["D"]), int(data["L"]))
    N = int(data["N"])
    flat = np.asarray(data["links"], dtype=np.float64)
    if flat.size != 2 * shape.K * shape.D * N * N:
        raise ValueError("link array length does not match D, L, N")
    links = (flat[0::2] + 1j * flat[1::2]).reshape(shape.K, shape.D, N, N)
    return GaugeConfig(shape, N, links, data.get("seed"), data.get("stream_id"))


def save_config(config, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_dict(config), fh)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))
