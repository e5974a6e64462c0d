"""Exact Gibbs sampling of plane trees at fixed size.

The sampler draws from the exact finite-n distribution (weight
``a^leaves * b^internal * c^root_degree``, normalized), not from an
asymptotic approximation.  It decomposes a tree into its sequence of
root branches: conditional branch-size laws come straight from the
series tables, so a draw is a walk down cumulative-weight rows.

A :class:`SamplerContext` owns the precomputed tables (O(n^2) floats; a
few hundred MB by n ~ 3e4, so this sampler is meant for n up to a few
thousand) and a seeded PCG64 stream.  Every tree consumes a fixed-size
block of uniforms, which makes batches bit-reproducible for a given
(seed, n, root bound) independent of batching.

Trees are only materialized on request; by default a batch records the
four summary statistics plus any requested toll values per tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import _kernels
from .properties import NAMED_TOLLS, PolynomialToll
from .series import SeriesTables, build_tables
from .trees import PlaneTree
from .weights import WeightTriple, coerce_weights

__all__ = [
    "SamplerContext",
    "SampleBatch",
    "make_context",
    "sample_tree",
    "sample_batch",
    "sample_batch_parallel",
    "sample_bounded_root",
    "shape_code_of_parens",
]

RNG_ALGORITHM = "pcg64"
SHAPE_CODE_MAX_EDGES = 31  # parenthesis bits must fit in a uint64


def shape_code_of_parens(text: str) -> int:
    """The packed-bit tree id used for histogramming small samples."""
    if len(text) > 2 * SHAPE_CODE_MAX_EDGES:
        raise ValueError("shape codes only exist for <= 31 edges")
    code = 0
    for ch in text:
        code = (code << 1) | (1 if ch == "(" else 0)
    return code


def _triangular_offsets(n: int) -> tuple[np.ndarray, int]:
    offs = np.zeros(n + 2, dtype=np.int64)
    for u in range(1, n + 2):
        offs[u] = offs[u - 1] + (u - 1)
    return offs, int(offs[n + 1])


def _cumulative_rows(g1: np.ndarray, right: np.ndarray, offs, tri, n) -> np.ndarray:
    out = np.empty(tri)
    for u in range(1, n + 1):
        row = g1[1 : u + 1] * right[u - 1 :: -1]
        out[offs[u] : offs[u] + u] = np.cumsum(row)
    return out


@dataclass
class SamplerContext:
    """Precomputed sampling state for one (n, weights, root bound)."""

    n: int
    weights: WeightTriple
    seed: int
    root_max: int | None
    tables: SeriesTables
    rng: np.random.Generator
    _offs: np.ndarray
    _tri: int
    _cum_g: np.ndarray
    _cum_root: np.ndarray
    _p_int: np.ndarray
    _bounded: dict = field(default_factory=dict)

    algorithm: str = RNG_ALGORITHM

    @property
    def uniforms_per_tree(self) -> int:
        return 2 * self.n + 4

    def with_root_max(self, h: int) -> "SamplerContext":
        """Sibling context with root degree capped at h, sharing the base
        tables and the same RNG stream."""
        if h == (self.root_max or 0):
            return self
        if h not in self._bounded:
            ctx = _finish_context(
                self.n, self.weights, self.tables, self.seed, h or None
            )
            ctx.rng = self.rng  # one stream per context family
            self._bounded[h] = ctx
        return self._bounded[h]

    def meta(self) -> dict:
        return {
            "n": self.n,
            "weights": {
                "a": float(self.weights.a),
                "b": float(self.weights.b),
                "c": float(self.weights.c),
            },
            "root_max": self.root_max,
            "seed": self.seed,
            "rng": self.algorithm,
        }


def make_context(
    n: int, params, seed: int, root_max: int | None = None
) -> SamplerContext:
    """Build tables for exact sampling of n-edge trees under ``params``.

    ``root_max`` restricts the root degree (h >= 1); weights may include
    a root factor c != 1 in either mode.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if root_max is not None and root_max < 1 and n >= 1:
        raise ValueError("root_max must be >= 1 for trees with edges")
    w = coerce_weights(params)
    tables = build_tables(WeightTriple(*w.as_floats()), n, exact=False)
    return _finish_context(n, tables.weights, tables, seed, root_max)


def _finish_context(
    n: int,
    w: WeightTriple,
    tables: SeriesTables,
    seed: int,
    root_max: int | None,
) -> SamplerContext:
    a, b, c = w.as_floats()
    g1, g, z = tables.g1, tables.g, tables.z
    offs, tri = _triangular_offsets(n)
    cum_g = _cumulative_rows(g1, g, offs, tri, n)
    if root_max is None:
        cum_root = _cumulative_rows(g1, z, offs, tri, n)
    else:
        h = root_max
        zh = np.zeros((h + 1, n + 1))
        zh[:, 0] = 1.0
        for d in range(1, h + 1):
            for u in range(1, n + 1):
                zh[d, u] = c * (g1[1 : u + 1] @ zh[d - 1, u - 1 :: -1])
        cum_root = np.empty(h * tri)
        for d in range(1, h + 1):
            block = _cumulative_rows(g1, zh[d - 1], offs, tri, n)
            cum_root[(d - 1) * tri : d * tri] = block
    ge2 = np.maximum(g - g1, 0.0)
    denom = b * g1 + ge2
    with np.errstate(invalid="ignore", divide="ignore"):
        p_int = np.where(denom > 0, b * g1 / denom, 1.0)
    p_int[0] = 1.0
    return SamplerContext(
        n=n,
        weights=w,
        seed=seed,
        root_max=root_max,
        tables=tables,
        rng=np.random.Generator(np.random.PCG64(seed)),
        _offs=offs,
        _tri=tri,
        _cum_g=cum_g,
        _cum_root=cum_root,
        _p_int=p_int,
    )


# ---------------------------------------------------------------------------
# batches
# ---------------------------------------------------------------------------


@dataclass
class SampleBatch:
    """Per-tree summaries from one sampling run.

    ``stats`` columns are (edges, leaves, internal, root_degree);
    ``columns`` holds one float64 array per requested toll.
    """

    n: int
    weights: WeightTriple
    root_max: int | None
    seed: int
    algorithm: str
    count: int
    stats: np.ndarray
    columns: dict[str, np.ndarray]
    shape_codes: np.ndarray | None = None
    parents: np.ndarray | None = None

    def tree(self, i: int) -> PlaneTree:
        if self.parents is None:
            raise ValueError("batch was sampled without keep_trees=True")
        return PlaneTree._trusted(self.parents[i].copy())

    def trees(self) -> Iterator[PlaneTree]:
        for i in range(self.count):
            yield self.tree(i)

    def column(self, name: str) -> np.ndarray:
        return self.columns[name]

    def meta(self) -> dict:
        return {
            "n": self.n,
            "count": self.count,
            "weights": {
                "a": float(self.weights.a),
                "b": float(self.weights.b),
                "c": float(self.weights.c),
            },
            "root_max": self.root_max,
            "seed": self.seed,
            "rng": self.algorithm,
            "tolls": sorted(self.columns),
        }


def _normalize_tolls(tolls) -> list[tuple[str, PolynomialToll]]:
    if tolls is None:
        return []
    out = []
    for item in tolls:
        if isinstance(item, str):
            if item not in NAMED_TOLLS:
                raise KeyError(
                    f"unknown toll {item!r}; named tolls: {sorted(NAMED_TOLLS)}"
                )
            out.append((item, NAMED_TOLLS[item]))
        elif isinstance(item, PolynomialToll):
            out.append((item.text, item))
        elif isinstance(item, tuple) and len(item) == 2:
            name, toll = item
            out.append((str(name), toll))
        else:
            raise TypeError(f"cannot interpret {item!r} as a toll")
    return out


def _pack_tolls(named: list[tuple[str, PolynomialToll]]):
    coef_parts, expo_parts = [], []
    prop_off = np.zeros(len(named) + 1, dtype=np.int64)
    for i, (_, toll) in enumerate(named):
        coefs, expos = toll.arrays()
        coef_parts.append(coefs)
        expo_parts.append(expos)
        prop_off[i + 1] = prop_off[i] + coefs.shape[0]
    if named:
        return np.concatenate(coef_parts), np.vstack(expo_parts), prop_off
    return (
        np.empty(0, dtype=np.float64),
        np.empty((0, 6), dtype=np.int64),
        prop_off,
    )


def sample_batch(
    ctx: SamplerContext,
    count: int,
    tolls=None,
    keep_trees: bool = False,
    want_shapes: bool = False,
    chunk_size: int | None = None,
) -> SampleBatch:
    """Draw ``count`` independent trees, recording stats and toll values.

    ``want_shapes`` additionally records a packed-bits tree id per draw
    (n <= 31 only), enough to histogram full tree distributions.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    if want_shapes and ctx.n > SHAPE_CODE_MAX_EDGES:
        raise ValueError("shape codes only exist for n <= 31")
    named = _normalize_tolls(tolls)
    coefs, expos, prop_off = _pack_tolls(named)
    stride = ctx.uniforms_per_tree
    if chunk_size is None:
        chunk_size = max(1, min(count, 8_000_000 // stride))
    stats_out = np.empty((count, 4), dtype=np.int64)
    prop_out = np.empty((count, len(named)), dtype=np.float64)
    shapes_out = (
        np.empty(count, dtype=np.uint64)
        if want_shapes
        else np.empty(1, dtype=np.uint64)
    )
    parents_out = (
        np.empty((count, ctx.n + 1), dtype=np.int32)
        if keep_trees
        else np.empty((1, 1), dtype=np.int32)
    )
    done = 0
    while done < count:
        k = min(chunk_size, count - done)
        ubuf = ctx.rng.random(k * stride)
        _kernels._batch(
            ctx.n,
            k,
            ubuf,
            stride,
            ctx._cum_g,
            ctx._offs,
            ctx._cum_root,
            ctx._tri,
            0 if ctx.root_max is None else ctx.root_max,
            ctx._p_int,
            coefs,
            expos,
            prop_off,
            stats_out[done : done + k],
            prop_out[done : done + k],
            shapes_out[done : done + k] if want_shapes else shapes_out,
            parents_out[done : done + k] if keep_trees else parents_out,
            keep_trees,
            want_shapes,
        )
        done += k
    return SampleBatch(
        n=ctx.n,
        weights=ctx.weights,
        root_max=ctx.root_max,
        seed=ctx.seed,
        algorithm=ctx.algorithm,
        count=count,
        stats=stats_out,
        columns={name: prop_out[:, i] for i, (name, _) in enumerate(named)},
        shape_codes=shapes_out if want_shapes else None,
        parents=parents_out if keep_trees else None,
    )


def sample_batch_parallel(
    n: int,
    params,
    count: int,
    seed: int,
    threads: int,
    tolls=None,
    root_max: int | None = None,
    keep_trees: bool = False,
    want_shapes: bool = False,
) -> SampleBatch:
    """Draw ``count`` trees across worker threads and merge the results.

    Each worker gets its own context with a child seed spawned from
    ``seed``, so output is reproducible for a fixed (seed, threads)
    pair; the kernels release the GIL, so workers run concurrently.
    """
    from concurrent.futures import ThreadPoolExecutor

    if threads < 1:
        raise ValueError("threads must be >= 1")
    threads = min(threads, max(count, 1))
    shares = [count // threads + (1 if i < count % threads else 0)
              for i in range(threads)]
    children = []
    for ss in np.random.SeedSequence(seed).spawn(threads):
        hi, lo = (int(v) for v in ss.generate_state(2))
        children.append(hi << 32 | lo)

    def run(share: int, child: int) -> SampleBatch:
        ctx = make_context(n, params, child, root_max=root_max)
        return sample_batch(
            ctx, share, tolls=tolls, keep_trees=keep_trees, want_shapes=want_shapes
        )

    if threads == 1:
        parts = [run(count, children[0])]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, shares, children))
    first = parts[0]
    return SampleBatch(
        n=first.n,
        weights=first.weights,
        root_max=first.root_max,
        seed=seed,
        algorithm=f"{RNG_ALGORITHM} x{threads}",
        count=count,
        stats=np.concatenate([p.stats for p in parts]),
        columns={
            name: np.concatenate([p.columns[name] for p in parts])
            for name in first.columns
        },
        shape_codes=(
            np.concatenate([p.shape_codes for p in parts]) if want_shapes else None
        ),
        parents=(
            np.concatenate([p.parents for p in parts]) if keep_trees else None
        ),
    )


def sample_tree(ctx: SamplerContext) -> PlaneTree:
    """One draw from the exact Gibbs law at size ctx.n."""
    batch = sample_batch(ctx, 1, keep_trees=True)
    return batch.tree(0)


def sample_bounded_root(ctx: SamplerContext, h: int) -> PlaneTree:
    """One draw conditioned on root degree <= h (exact, not rejection)."""
    return sample_tree(ctx.with_root_max(h))
