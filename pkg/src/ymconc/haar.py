"""Haar-distributed U(N) matrices and the random streams that feed them."""

from dataclasses import dataclass

import numpy as np

from . import kernels

UNITARITY_TOL = 1e-10


@dataclass(frozen=True)
class RngStream:
    """A reproducible substream: equal ``(seed, stream_id)`` give equal draws.

    Substreams with different ``stream_id`` are statistically independent;
    they are derived with :class:`numpy.random.SeedSequence` spawn keys, so
    worker ``k`` of a parallel run simply owns ``RngStream(seed, k)``.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not (0 <= self.seed < 2**64 and 0 <= self.stream_id < 2**64):
            raise ValueError("seed and stream_id must be 64-bit unsigned integers")

    def generator(self):
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))


def _as_generator(rng):
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def ginibre(gen, shape, N):
    """Complex Gaussian matrices with E|G_ij|^2 = 1, real part drawn first."""
    full = tuple(shape) + (N, N)
    re = gen.standard_normal(full)
    im = gen.standard_normal(full)
    return (re + 1j * im) * np.sqrt(0.5)


def haar_from_ginibre(g):
    """Map Ginibre matrices to Haar unitaries (QR with positive diag(R))."""
    g = np.asarray(g, dtype=np.complex128)
    lead = g.shape[:-2]
    N = g.shape[-1]
    flat = np.ascontiguousarray(g.reshape((-1, N, N)))
    return kernels.orthonormalize(flat).reshape(lead + (N, N))


def sample_haar_batch(N, size, rng):
    """Array of shape ``size + (N, N)`` of independent Haar unitaries.

    ``rng`` may be an :class:`RngStream` (a fresh generator is created from
    it) or a live :class:`numpy.random.Generator` (which is advanced).
    """
    if int(N) != N or N < 1:
        raise ValueError(f"matrix size must be a positive integer, got {N!r}")
    if np.isscalar(size):
        size = (int(size),)
    gen = _as_generator(rng)
    return haar_from_ginibre(ginibre(gen, size, int(N)))


def sample_haar_unitary(N, rng):
    """One Haar-random element of U(N)."""
    return sample_haar_batch(N, (), rng)


def unitarity_residual(u):
    """Max-norm of ``U^+ U - I``, maximised over any leading batch axes."""
    u = np.asarray(u)
    N = u.shape[-1]
    r = u.conj().swapaxes(-1, -2) @ u - np.eye(N)
    return float(np.max(np.abs(r))) if r.size else 0.0


def is_unitary(u, tol=UNITARITY_TOL):
    return unitarity_residual(u) <= tol


def dagger(u):
    return np.conj(np.swapaxes(u, -1, -2))
