"""Hot inner loops, each in a numpy flavour and a numba flavour.

The public names at the bottom of the module are bound through
:func:`ymconc._accel.select`; set ``YMCONC_DISABLE_NUMBA=1`` to force the
numpy versions.  The two flavours agree to rounding error (the Haar
orthonormalization produces the unique QR factor with positive diagonal in
both cases, so the same Gaussian input gives the same unitary).
"""

import numpy as np

from ._accel import njit, select


# --------------------------------------------------------------------------
# Haar orthonormalization of complex Ginibre matrices, shape (M, N, N)
# --------------------------------------------------------------------------

def orthonormalize_numpy(g):
    q, r = np.linalg.qr(g)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    # columns of q absorb the phases of diag(r) so that r has positive diagonal
    return q * (d / np.abs(d))[..., None, :]


def _orthonormalize_loops(g):
    m, n, _ = g.shape
    # work on rows of the transpose so that every column is contiguous
    q = np.empty((m, n, n), dtype=np.complex128)
    for b in range(m):
        for i in range(n):
            for j in range(n):
                q[b, j, i] = g[b, i, j]
    out = np.empty_like(q)
    for b in range(m):
        v = q[b]
        for j in range(n):
            # classical Gram-Schmidt, applied twice for orthogonality at eps level
            for _ in range(2):
                for k in range(j):
                    sr = 0.0
                    si = 0.0
                    for i in range(n):
                        a = v[k, i]
                        c = v[j, i]
                        sr += a.real * c.real + a.imag * c.imag
                        si += a.real * c.imag - a.imag * c.real
                    s = complex(sr, si)
                    for i in range(n):
                        v[j, i] -= s * v[k, i]
            nrm = 0.0
            for i in range(n):
                c = v[j, i]
                nrm += c.real * c.real + c.imag * c.imag
            inv = 1.0 / np.sqrt(nrm)
            for i in range(n):
                v[j, i] *= inv
        for i in range(n):
            for j in range(n):
                out[b, i, j] = v[j, i]
    return out


orthonormalize_numba = njit(_orthonormalize_loops)


# --------------------------------------------------------------------------
# Plaquette traces: links (B, E, N, N), plaquettes (P, 4) edge indices.
# Holonomy = U[e3]^+ U[e2]^+ U[e1] U[e0] for edges listed as
# (x, mu), (x+mu, nu), (x+nu, mu), (x, nu).
# --------------------------------------------------------------------------

def plaquette_traces_numpy(links, plaq):
    u0 = links[:, plaq[:, 0]]
    u1 = links[:, plaq[:, 1]]
    u2 = links[:, plaq[:, 2]]
    u3 = links[:, plaq[:, 3]]
    h = u3.conj().swapaxes(-1, -2) @ u2.conj().swapaxes(-1, -2) @ u1 @ u0
    return np.trace(h, axis1=-2, axis2=-1)


def _plaquette_traces_loops(links, plaq):
    nb = links.shape[0]
    n = links.shape[2]
    npl = plaq.shape[0]
    out = np.empty((nb, npl), dtype=np.complex128)
    a = np.empty((n, n), dtype=np.complex128)
    c = np.empty((n, n), dtype=np.complex128)
    for b in range(nb):
        for p in range(npl):
            u0 = links[b, plaq[p, 0]]
            u1 = links[b, plaq[p, 1]]
            u2 = links[b, plaq[p, 2]]
            u3 = links[b, plaq[p, 3]]
            # a = u1 @ u0
            for i in range(n):
                for j in range(n):
                    s = 0j
                    for k in range(n):
                        s += u1[i, k] * u0[k, j]
                    a[i, j] = s
            # c = u2^+ @ a
            for i in range(n):
                for j in range(n):
                    s = 0j
                    for k in range(n):
                        s += u2[k, i].conjugate() * a[k, j]
                    c[i, j] = s
            # tr(u3^+ @ c)
            s = 0j
            for i in range(n):
                for k in range(n):
                    s += u3[k, i].conjugate() * c[k, i]
            out[b, p] = s
    return out


plaquette_traces_numba = njit(_plaquette_traces_loops)


# --------------------------------------------------------------------------
# Pairing enumeration over ordered tuples of oriented plaquettes.
# Oriented plaquette o encodes plaquette o // 2 and orientation o % 2.
# Each tuple is weighted by the number of perfect matchings of its positions
# into same-plaquette opposite-orientation pairs: prod_p n_p! if n_p+ == n_p-.
# --------------------------------------------------------------------------

def _factorial_table(l):
    f = np.ones(l + 1, dtype=np.int64)
    for i in range(2, l + 1):
        f[i] = f[i - 1] * i
    return f


def count_matchings_numpy(n_plaquettes, l):
    if l == 0:
        return 1
    n_or = 2 * n_plaquettes
    fact = _factorial_table(l)
    total = 0
    # chunk on the first position to bound memory
    rest = np.indices((n_or,) * (l - 1)).reshape(l - 1, -1).T if l > 1 else np.zeros((1, 0), np.int64)
    for first in range(n_or):
        tup = np.concatenate([np.full((rest.shape[0], 1), first), rest], axis=1)
        plus = np.zeros((tup.shape[0], n_plaquettes), dtype=np.int64)
        minus = np.zeros_like(plus)
        rows = np.arange(tup.shape[0])
        for pos in range(l):
            p = tup[:, pos] // 2
            o = tup[:, pos] % 2
            np.add.at(plus, (rows[o == 0], p[o == 0]), 1)
            np.add.at(minus, (rows[o == 1], p[o == 1]), 1)
        ok = np.all(plus == minus, axis=1)
        total += int(np.prod(fact[plus[ok]], axis=1).sum())
    return total


def _count_matchings_loops(n_plaquettes, l):
    if l == 0:
        return 1
    n_or = 2 * n_plaquettes
    fact = np.ones(l + 1, dtype=np.int64)
    for i in range(2, l + 1):
        fact[i] = fact[i - 1] * i
    idx = np.zeros(l, dtype=np.int64)
    plus = np.zeros(n_plaquettes, dtype=np.int64)
    minus = np.zeros(n_plaquettes, dtype=np.int64)
    total = 0
    while True:
        plus[:] = 0
        minus[:] = 0
        for pos in range(l):
            o = idx[pos]
            if o % 2 == 0:
                plus[o // 2] += 1
            else:
                minus[o // 2] += 1
        w = 1
        for p in range(n_plaquettes):
            if plus[p] != minus[p]:
                w = 0
                break
            w *= fact[plus[p]]
        total += w
        # mixed-radix increment
        pos = l - 1
        while pos >= 0:
            idx[pos] += 1
            if idx[pos] < n_or:
                break
            idx[pos] = 0
            pos -= 1
        if pos < 0:
            break
    return total


count_matchings_numba = njit(_count_matchings_loops)


# --------------------------------------------------------------------------
# Index-loop counting for the exact moment engine.
# merges: (M, 2) array of index-variable pairs identified by Kronecker deltas.
# Returns the number of connected components among n_vars variables.
# --------------------------------------------------------------------------

def count_loops_python(n_vars, merges):
    parent = list(range(n_vars))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    comps = n_vars
    for a, b in merges:
        ra, rb = find(int(a)), find(int(b))
        if ra != rb:
            parent[ra] = rb
            comps -= 1
    return comps


def _loop_histogram_loops(n_vars, fixed, choice_merges, choice_offsets, radices):
    """Loop count for every combination of per-edge permutation choices.

    ``fixed`` holds merges common to every combination.  Edge ``e`` offers
    ``radices[e]`` alternative merge lists; alternative ``c`` of edge ``e`` is
    ``choice_merges[choice_offsets[e, c]:choice_offsets[e, c + 1]]``.
    Output row ``r`` lists the loop count of the r-th combination in
    mixed-radix order (last edge fastest).
    """
    n_edges = radices.shape[0]
    total = 1
    for e in range(n_edges):
        total *= radices[e]
    out = np.empty(total, dtype=np.int64)
    idx = np.zeros(n_edges, dtype=np.int64)
    parent = np.empty(n_vars, dtype=np.int64)
    for r in range(total):
        for v in range(n_vars):
            parent[v] = v
        comps = n_vars
        for m in range(fixed.shape[0]):
            a = fixed[m, 0]
            while parent[a] != a:
                a = parent[a]
            b = fixed[m, 1]
            while parent[b] != b:
                b = parent[b]
            if a != b:
                parent[a] = b
                comps -= 1
        for e in range(n_edges):
            c = idx[e]
            for m in range(choice_offsets[e, c], choice_offsets[e, c + 1]):
                a = choice_merges[m, 0]
                while parent[a] != a:
                    a = parent[a]
                b = choice_merges[m, 1]
                while parent[b] != b:
                    b = parent[b]
                if a != b:
                    parent[a] = b
                    comps -= 1
        out[r] = comps
        e = n_edges - 1
        while e >= 0:
            idx[e] += 1
            if idx[e] < radices[e]:
                break
            idx[e] = 0
            e -= 1
    return out


def loop_histogram_python(n_vars, fixed, choice_merges, choice_offsets, radices):
    import itertools

    out = []
    for combo in itertools.product(*[range(int(r)) for r in radices]):
        merges = [tuple(m) for m in fixed]
        for e, c in enumerate(combo):
            merges.extend(tuple(m) for m in choice_merges[choice_offsets[e, c]:choice_offsets[e, c + 1]])
        out.append(count_loops_python(n_vars, merges))
    return np.asarray(out, dtype=np.int64)


loop_histogram_numba = njit(_loop_histogram_loops)


orthonormalize = select(orthonormalize_numba, orthonormalize_numpy)
plaquette_traces = select(plaquette_traces_numba, plaquette_traces_numpy)
count_matchings = select(count_matchings_numba, count_matchings_numpy)
loop_histogram = select(loop_histogram_numba, loop_histogram_python)
