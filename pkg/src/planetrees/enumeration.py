"""Exhaustive enumeration of plane trees and exact Gibbs ground truth.

Trees with n edges are visited as balanced-parenthesis strings in
lexicographic order ('(' < ')'), via an in-place successor step, so the
first string is ``"(" * n + ")" * n`` and the last is ``"()" * n``.

The exact engines below weigh every tree by ``a^leaves * b^internal *
c^root_degree`` and accumulate partition sums, property moments, or full
distributions.  With rational weights everything is computed in
`Fraction` arithmetic; float weights give float sums.  Catalan growth
makes this practical only for small n, so every entry point enforces an
overridable guard (default n <= 16).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .properties import PolynomialToll
from .trees import PlaneTree
from .weights import WeightTriple, coerce_weights

__all__ = [
    "DEFAULT_GUARD",
    "iter_parens",
    "enumerate_trees",
    "ExactDistribution",
    "exact_partition",
    "exact_moments",
    "exact_moment_table",
    "exact_distribution",
]

DEFAULT_GUARD = 16


def _check_guard(n: int, guard: int | None) -> None:
    if n < 0:
        raise ValueError("n must be >= 0")
    if guard is not None and n > guard:
        raise ValueError(
            f"n = {n} exceeds the enumeration guard ({guard}); "
            f"pass a larger guard (or guard=None) to force it"
        )


def iter_parens(n: int) -> Iterator[str]:
    """All balanced-parenthesis strings with n pairs, lexicographically."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        yield ""
        return
    s = bytearray(b"(" * n + b")" * n)
    op, cl = ord("("), ord(")")
    while True:
        yield s.decode()
        # successor: rightmost '(' whose suffix holds more ')' than '('
        # flips to ')'; the tail is refilled minimally.
        opens = closes = 0
        i = len(s) - 1
        while i >= 0:
            if s[i] == cl:
                closes += 1
            else:
                opens += 1
                if closes > opens:
                    break
            i -= 1
        if i < 0:
            return
        s[i] = cl
        s[i + 1 :] = b"(" * opens + b")" * (closes - 1)


def enumerate_trees(n: int, guard: int | None = DEFAULT_GUARD) -> Iterator[PlaneTree]:
    """All plane trees with n edges, in lexicographic paren order."""
    _check_guard(n, guard)
    for text in iter_parens(n):
        yield PlaneTree.from_parens(text)


def _subtree_profiles(text: str):
    """One stack pass over a paren string.

    Returns ``(records, whole)`` where ``records`` lists extended
    ``(edges, leaves, internal)`` per non-root vertex (postorder) and
    ``whole`` is ``(n, leaves, internal, root_degree)`` of the tree.
    """
    records = []
    # frame: [edges, leaves_below, internal_below, children]
    root = [0, 0, 0, 0]
    stack = [root]
    for ch in text:
        if ch == "(":
            stack.append([0, 0, 0, 0])
        else:
            t, sl0, sl1, kids = stack.pop()
            e0 = sl0 + (1 if kids == 0 else 0)
            e1 = sl1 + (1 if kids == 1 else 0)
            records.append((t, e0, e1))
            top = stack[-1]
            top[0] += t + 1
            top[1] += e0
            top[2] += e1
            top[3] += 1
    return records, (root[0], root[1], root[2], root[3])


@dataclass(frozen=True)
class ExactDistribution:
    """Exact Gibbs distribution of a statistic at fixed size.

    ``masses`` maps statistic values (or paren strings when no toll was
    given) to unnormalized Boltzmann mass; ``partition`` is their sum.
    """

    n: int
    weights: WeightTriple
    root_max: int | None
    masses: dict
    partition: object

    def probability(self, key) -> float:
        return float(self.masses.get(key, 0) / self.partition)

    def probabilities(self) -> dict:
        return {k: v / self.partition for k, v in self.masses.items()}

    def support(self) -> list:
        return sorted(self.masses)

    def mean(self):
        num = sum(k * v for k, v in self.masses.items())
        return num / self.partition

    def moment(self, k: int):
        num = sum(key**k * v for key, v in self.masses.items())
        return num / self.partition


def _pow_tables(value, n: int) -> list:
    out = [1] * (n + 2)
    for i in range(1, n + 2):
        out[i] = out[i - 1] * value
    return out


def exact_moment_table(
    n: int,
    weight_sets: Sequence,
    tolls: Sequence[PolynomialToll],
    k_max: int = 1,
    root_max: int | None = None,
    guard: int | None = DEFAULT_GUARD,
):
    """Raw Gibbs moments E[P^k] by brute force, for several weight triples
    and several tolls in a single enumeration pass.

    Returns ``(moments, partitions)``: ``moments[i][j][k-1]`` is E[P_j^k]
    under weight set i, and ``partitions[i]`` the partition sum.  Exact
    (Fraction) wherever weights and toll coefficients are rational.
    """
    _check_guard(n, guard)
    wts = [coerce_weights(w) for w in weight_sets]
    pows = [
        (_pow_tables(w.a, n), _pow_tables(w.b, n), _pow_tables(w.c, n))
        for w in wts
    ]
    tolls = list(tolls)
    terms = [sorted(tl.monomials.items()) for tl in tolls]
    sums = [[[0] * k_max for _ in tolls] for _ in wts]
    partitions = [0] * len(wts)
    for text in iter_parens(n):
        records, (edges, big0, big1, rdeg) = _subtree_profiles(text)
        if root_max is not None and rdeg > root_max:
            continue
        values = []
        for term in terms:
            total = 0
            for expo, coef in term:
                et, e0, e1, en, eb0, eb1 = expo
                whole = coef
                for _ in range(en):
                    whole = whole * edges
                for _ in range(eb0):
                    whole = whole * big0
                for _ in range(eb1):
                    whole = whole * big1
                if et == 0 and e0 == 0 and e1 == 0:
                    total = total + whole * len(records)
                    continue
                acc = 0
                for t, l0, l1 in records:
                    term_val = 1
                    for _ in range(et):
                        term_val *= t
                    for _ in range(e0):
                        term_val *= l0
                    for _ in range(e1):
                        term_val *= l1
                    acc += term_val
                total = total + whole * acc
            values.append(total)
        for i, (pa, pb, pc) in enumerate(pows):
            w = pa[big0] * pb[big1] * pc[rdeg]
            partitions[i] = partitions[i] + w
            row = sums[i]
            for j, v in enumerate(values):
                acc = w
                for k in range(k_max):
                    acc = acc * v
                    row[j][k] = row[j][k] + acc
    moments = [
        [[s / partitions[i] for s in row] for row in sums[i]]
        for i in range(len(wts))
    ]
    return moments, partitions


def exact_partition(
    n: int, params, root_max: int | None = None, guard: int | None = DEFAULT_GUARD
):
    """Partition sum over all trees with n edges (optionally root-bounded)."""
    _, partitions = exact_moment_table(
        n, [params], [], k_max=0, root_max=root_max, guard=guard
    )
    return partitions[0]


def exact_moments(
    n: int,
    params,
    toll: PolynomialToll,
    k_max: int = 2,
    root_max: int | None = None,
    guard: int | None = DEFAULT_GUARD,
) -> list:
    """E[P^k] for k = 1..k_max under the Gibbs law at size n."""
    moments, _ = exact_moment_table(
        n, [params], [toll], k_max=k_max, root_max=root_max, guard=guard
    )
    return moments[0][0]


def exact_distribution(
    n: int,
    params,
    toll: PolynomialToll | None = None,
    root_max: int | None = None,
    guard: int | None = DEFAULT_GUARD,
) -> ExactDistribution:
    """Exact distribution of a toll value (or of whole trees, keyed by
    paren string, when ``toll`` is None)."""
    _check_guard(n, guard)
    w = coerce_weights(params)
    pa, pb, pc = (
        _pow_tables(w.a, n),
        _pow_tables(w.b, n),
        _pow_tables(w.c, n),
    )
    term = sorted(toll.monomials.items()) if toll is not None else None
    masses: dict = {}
    partition = 0
    for text in iter_parens(n):
        records, (edges, big0, big1, rdeg) = _subtree_profiles(text)
        if root_max is not None and rdeg > root_max:
            continue
        weight = pa[big0] * pb[big1] * pc[rdeg]
        partition = partition + weight
        if term is None:
            key = text
        else:
            key = 0
            for expo, coef in term:
                et, e0, e1, en, eb0, eb1 = expo
                whole = coef
                for _ in range(en):
                    whole = whole * edges
                for _ in range(eb0):
                    whole = whole * big0
                for _ in range(eb1):
                    whole = whole * big1
                acc = 0
                for t, l0, l1 in records:
                    tv = 1
                    for _ in range(et):
                        tv *= t
                    for _ in range(e0):
                        tv *= l0
                    for _ in range(e1):
                        tv *= l1
                    acc += tv
                key = key + whole * acc
        masses[key] = masses.get(key, 0) + weight
    if partition == 0:
        raise ValueError(
            f"no tree with n = {n} satisfies the root bound {root_max}"
        )
    return ExactDistribution(
        n=n, weights=w, root_max=root_max, masses=masses, partition=partition
    )
