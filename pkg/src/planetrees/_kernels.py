"""Numerical kernels for the exact Gibbs sampler.

Everything here operates on plain numpy arrays so the functions compile
under numba; if numba is missing the same code runs un-jitted (orders of
magnitude slower, same results).

Layouts:

* ``cum_g`` -- triangular table of cumulative branch weights.  Row ``u``
  (1 <= u <= N) lives at ``offs[u] : offs[u] + u`` and holds cumulative
  sums over j of ``g1[j] * g[u-j]``: the unnormalized law of the size of
  the next root branch of a free branch sequence with u edges left.
* ``cum_root`` -- same shape for the root sequence.  Unbounded: one
  table of ``g1[j] * z[u-j]``.  Bounded by h: h stacked tables, block
  ``d-1`` holding ``g1[j] * z_h[u-j, d-1]`` (d = components still
  allowed).
* ``p_int[s]`` -- probability that a subtree of size s >= 1 hanging
  under a fresh edge has root degree 1 (vs >= 2).

Trees are written as preorder parent arrays (int32, parent[0] = -1).
Each tree consumes exactly ``2n + 4`` uniforms from its slot in the
buffer; the tail is discarded, which keeps batches reproducible for a
given seed no matter how the driver chunks them.
"""

from __future__ import annotations

import numpy as np

try:  # pragma: no cover - exercised implicitly by every sampler test
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


# frame modes on the work stack
_FREE = 0  # free branch sequence (law cum_g, full row)
_TRUNC = 1  # first branch of a root-degree->=2 subtree (row minus last cell)
_ROOT = 2  # root sequence (law cum_root)


@njit(cache=True, nogil=True)
def _generate(
    parent,
    n,
    ubuf,
    base,
    cum_g,
    offs,
    cum_root,
    tri_size,
    hmax,
    p_int,
    st_pv,
    st_u,
    st_mode,
    st_d,
):
    """Generate one tree of n edges into ``parent``; returns uniforms used."""
    parent[0] = -1
    if n == 0:
        return 0
    uptr = base
    nv = 1
    sp = 0
    st_pv[0] = 0
    st_u[0] = n
    st_mode[0] = _ROOT
    st_d[0] = hmax
    while sp >= 0:
        pv = st_pv[sp]
        u = st_u[sp]
        mode = st_mode[sp]
        d = st_d[sp]
        sp -= 1
        if mode == _ROOT:
            if hmax > 0:
                lo = (d - 1) * tri_size + offs[u]
            else:
                lo = offs[u]
            row = cum_root[lo : lo + u]
        else:
            row = cum_g[offs[u] : offs[u] + u]
        hi = u - 1 if mode == _TRUNC else u
        total = row[hi - 1]
        x = ubuf[uptr] * total
        uptr += 1
        j = np.searchsorted(row[:hi], x, side="right") + 1
        if j > hi:  # float edge case
            j = hi
        if u - j > 0:
            sp += 1
            st_pv[sp] = pv
            st_u[sp] = u - j
            st_mode[sp] = _ROOT if mode == _ROOT else _FREE
            st_d[sp] = d - 1
        # branch: new edge from pv, subtree of size j - 1 below it
        v = nv
        nv += 1
        parent[v] = pv
        s = j - 1
        while s > 0:
            x = ubuf[uptr]
            uptr += 1
            if x < p_int[s]:
                w = nv
                nv += 1
                parent[w] = v
                v = w
                s -= 1
            else:
                sp += 1
                st_pv[sp] = v
                st_u[sp] = s
                st_mode[sp] = _TRUNC
                st_d[sp] = 0
                break
    return uptr - base


@njit(cache=True, nogil=True)
def _subtree_pass(parent, nv, down, tsub, e0, e1):
    """Extended per-subtree (edges, leaves, internal); slot 0 ends up with
    the whole-tree standard counts."""
    for i in range(nv):
        down[i] = 0
        tsub[i] = 0
        e0[i] = 0
        e1[i] = 0
    for i in range(1, nv):
        down[parent[i]] += 1
    for i in range(nv - 1, 0, -1):
        p = parent[i]
        if down[i] == 0:
            e0[i] += 1
        elif down[i] == 1:
            e1[i] += 1
        tsub[p] += tsub[i] + 1
        e0[p] += e0[i]
        e1[p] += e1[i]


@njit(cache=True, nogil=True, inline="always")
def _ipow(x, e):
    r = 1.0
    for _ in range(e):
        r *= x
    return r


@njit(cache=True, nogil=True)
def _accumulate_tolls(tsub, e0, e1, nv, coefs, expos, prop_off, out_row):
    nn = float(tsub[0])
    big0 = float(e0[0])
    big1 = float(e1[0])
    m_total = coefs.shape[0]
    whole = np.empty(m_total)
    for m in range(m_total):
        whole[m] = (
            coefs[m]
            * _ipow(nn, expos[m, 3])
            * _ipow(big0, expos[m, 4])
            * _ipow(big1, expos[m, 5])
        )
    for p in range(prop_off.shape[0] - 1):
        acc = 0.0
        for m in range(prop_off[p], prop_off[p + 1]):
            et = expos[m, 0]
            ea = expos[m, 1]
            eb = expos[m, 2]
            if et == 0 and ea == 0 and eb == 0:
                acc += whole[m] * (nv - 1)
            else:
                s = 0.0
                for v in range(1, nv):
                    s += (
                        _ipow(float(tsub[v]), et)
                        * _ipow(float(e0[v]), ea)
                        * _ipow(float(e1[v]), eb)
                    )
                acc += whole[m] * s
        out_row[p] = acc


@njit(cache=True, nogil=True)
def _shape_code(parent, nv, depth):
    """Preorder parenthesis bits packed into a uint64 ('(' = 1); only
    valid for nv - 1 <= 31 edges."""
    depth[0] = 0
    code = np.uint64(0)
    for i in range(1, nv):
        depth[i] = depth[parent[i]] + 1
        code = (code << np.uint64(1)) | np.uint64(1)
        if i + 1 < nv:
            closes = depth[i] - depth[parent[i + 1]]
        else:
            closes = depth[i]
        code = code << np.uint64(closes)
    return code


@njit(cache=True, nogil=True)
def _batch(
    n,
    count,
    ubuf,
    stride,
    cum_g,
    offs,
    cum_root,
    tri_size,
    hmax,
    p_int,
    coefs,
    expos,
    prop_off,
    stats_out,
    prop_out,
    shapes_out,
    parents_out,
    keep_parents,
    want_shapes,
):
    nv = n + 1
    parent = np.empty(nv, dtype=np.int32)
    down = np.empty(nv, dtype=np.int64)
    tsub = np.empty(nv, dtype=np.int64)
    e0 = np.empty(nv, dtype=np.int64)
    e1 = np.empty(nv, dtype=np.int64)
    depth = np.empty(nv, dtype=np.int64)
    cap = n + 4
    st_pv = np.empty(cap, dtype=np.int64)
    st_u = np.empty(cap, dtype=np.int64)
    st_mode = np.empty(cap, dtype=np.int64)
    st_d = np.empty(cap, dtype=np.int64)
    nprop = prop_off.shape[0] - 1
    for i in range(count):
        _generate(
            parent,
            n,
            ubuf,
            i * stride,
            cum_g,
            offs,
            cum_root,
            tri_size,
            hmax,
            p_int,
            st_pv,
            st_u,
            st_mode,
            st_d,
        )
        _subtree_pass(parent, nv, down, tsub, e0, e1)
        stats_out[i, 0] = tsub[0]
        stats_out[i, 1] = e0[0]
        stats_out[i, 2] = e1[0]
        stats_out[i, 3] = down[0]
        if nprop > 0:
            _accumulate_tolls(tsub, e0, e1, nv, coefs, expos, prop_off, prop_out[i])
        if want_shapes:
            shapes_out[i] = _shape_code(parent, nv, depth)
        if keep_parents:
            for v in range(nv):
                parents_out[i, v] = parent[v]
