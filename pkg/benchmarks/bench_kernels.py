"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each kernel is called once untimed so JIT compilation is excluded.
"""

import argparse
import time

import numpy as np

from ymconc import _accel, kernels
from ymconc.haar import RngStream, ginibre, sample_haar_batch
from ymconc.lattice import LatticeShape, plaquette_edge_table
from ymconc.moments import moment_terms


def best_of(func, repeat):
    func()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        func()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    g = ginibre(np.random.default_rng(0), (20_000,), 16)
    shape = LatticeShape(2, 8)
    links = sample_haar_batch(4, (2000, shape.n_edges), RngStream(0))
    table = plaquette_edge_table(shape)
    yield ("orthonormalize 20000 x 16x16", lambda: kernels.orthonormalize_numpy(g),
           lambda: kernels.orthonormalize_numba(g))
    yield ("plaquette_traces 2000 x 64 plaq, N=4", lambda: kernels.plaquette_traces_numpy(links, table),
           lambda: kernels.plaquette_traces_numba(links, table))
    yield ("count_matchings P=9, l=4", lambda: kernels.count_matchings_numpy(9, 4),
           lambda: kernels.count_matchings_numba(9, 4))


def bench_moment_engine(repeat):
    # whole l=4 exact-moment build with each loop-histogram backend
    out = {}
    for name, impl in (("numpy", kernels.loop_histogram_python), ("numba", kernels.loop_histogram_numba)):
        saved = kernels.loop_histogram
        kernels.loop_histogram = impl
        try:
            def run():
                moment_terms.cache_clear()
                moment_terms(4, 2, 2)
            out[name] = best_of(run, repeat)
        finally:
            kernels.loop_histogram = saved
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        print("numba not installed; nothing to compare")
        return
    print(f"{'kernel':42s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s}")
    rows = [(name, best_of(a, args.repeat), best_of(b, args.repeat)) for name, a, b in cases()]
    m = bench_moment_engine(args.repeat)
    rows.append(("exact moment l=4, D=2, L=2", m["numpy"], m["numba"]))
    for name, tn, tb in rows:
        print(f"{name:42s} {tn:10.4f} {tb:10.4f} {tn / tb:7.1f}x")


if __name__ == "__main__":
    main()
