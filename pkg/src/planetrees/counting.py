"""Closed-form counts of plane trees by leaf / internal / root-degree profile.

All counting here is exact integer arithmetic: products are formed before
the final division and divisibility is asserted, so any formula defect
surfaces as a hard error instead of a rounding artifact.

Conventions: ``n`` edges, ``k`` leaves, ``m`` internal vertices (non-root,
down-degree 1), ``r`` root degree.  The count of trees with a given
``(m, k, r)`` profile is nonzero only in two regions:

* ``n - m > k > r``  -- the generic region ("interior"),
* ``n - m = k = r``  -- trees whose root branches are all bare paths
  ("path-forest"); then the count is C(n-1, m).

Everything else is empty: each root branch contains at least one leaf, so
``k >= r``, and ``k == r`` forces every branch to be a path, which in turn
forces ``n - m == k``.  The exhaustive tests confirm this for all n <= 10.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

from .trees import PlaneTree

__all__ = [
    "catalan",
    "motzkin",
    "count_by_leaves",
    "count_by_root",
    "count_by_internal",
    "count_full",
    "count_mk",
    "count_kr",
    "classify_region",
    "psi",
    "leftmost_path_length",
    "leaves_with_left_sibling",
    "to_parens",
    "from_parens",
]


def _exact_div(num: int, den: int) -> int:
    q, rem = divmod(num, den)
    assert rem == 0, f"non-divisible count: {num} / {den}"
    return q


def _binom(a: int, b: int) -> int:
    """C(a, b), zero outside the triangle (including negative a)."""
    if b < 0 or a < 0 or b > a:
        return 0
    return comb(a, b)


def catalan(n: int) -> int:
    """Number of plane trees with n edges."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return _exact_div(comb(2 * n, n), n + 1)


@lru_cache(maxsize=None)
def motzkin(n: int) -> int:
    """Motzkin number: sum_k C(n, 2k) * catalan(k)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return sum(comb(n, 2 * k) * catalan(k) for k in range(n // 2 + 1))


def count_by_leaves(n: int, k: int) -> int:
    """Trees with n edges and k leaves (Narayana numbers)."""
    if n == 0:
        return 1 if k == 0 else 0
    if not 1 <= k <= n:
        return 0
    return _exact_div(comb(n, k) * comb(n, k - 1), n)


def count_by_root(n: int, r: int) -> int:
    """Trees with n edges and root degree r."""
    if n == 0:
        return 1 if r == 0 else 0
    if not 1 <= r <= n:
        return 0
    return _exact_div(r * comb(2 * n - 1 - r, n - 1), n)


def count_by_internal(n: int, m: int) -> int:
    """Trees with n edges and m internal vertices."""
    if n == 0:
        return 1 if m == 0 else 0
    if not 0 <= m <= n - 1:
        return 0
    return comb(n - 1, m) * motzkin(n - m - 1)


def classify_region(n: int, m: int, k: int, r: int) -> str:
    """Which case of the (m, k, r) count applies: 'interior', 'path-forest',
    or 'empty' (provably zero)."""
    if n == 0:
        return "path-forest" if (m, k, r) == (0, 0, 0) else "empty"
    if m < 0 or k < 1 or r < 1 or m + k > n or r > k:
        return "empty"
    if n - m > k > r:
        return "interior"
    if n - m == k == r:
        return "path-forest"
    return "empty"


def count_full(n: int, m: int, k: int, r: int) -> int:
    """Trees with n edges, m internal vertices, k leaves, root degree r."""
    region = classify_region(n, m, k, r)
    if region == "empty":
        return 0
    if region == "path-forest":
        return 1 if n == 0 else _binom(n - 1, m)
    return _exact_div(
        r
        * _binom(n, k + m)
        * _binom(k + m, k)
        * _binom(k - r - 1, n - m - k - 1),
        n,
    )


def count_mk(n: int, m: int, k: int) -> int:
    """Trees with n edges, m internal vertices and k leaves."""
    if n == 0:
        return 1 if (m, k) == (0, 0) else 0
    if m < 0 or k < 1 or m + k > n:
        return 0
    if n - m == k:
        return _binom(n - 1, m)
    if n - m > k:
        return _exact_div(
            _binom(n, k + m) * _binom(k + m, k) * _binom(k, n - m - k + 1), n
        )
    return 0


def count_kr(n: int, k: int, r: int) -> int:
    """Trees with n edges, k leaves and root degree r."""
    if n == 0:
        return 1 if (k, r) == (0, 0) else 0
    if k < 1 or r < 1 or k > n or r > k:
        return 0
    if k == r:
        # all-path root branches: compositions of n into k parts
        return _binom(n - 1, k - 1)
    return _exact_div(r * _binom(n, k) * _binom(n - r - 1, n - k - 1), n)


# ---------------------------------------------------------------------------
# the grafting involution
# ---------------------------------------------------------------------------


def psi(tree: PlaneTree) -> PlaneTree:
    """The involution defined by psi(join(t1, t2)) = join(psi(t2), psi(t1)).

    It swaps profile data: root degree becomes leftmost-path length, the
    leaf count k becomes n + 1 - k, and the internal count becomes the
    number of leaves that have a left sibling.
    """
    text = tree.to_parens()
    match = _matching_indices(text)
    out: list[str] = []
    # ("seg", lo, hi) rewrites text[lo:hi]; ("lit", ch, 0) emits ch
    work: list[tuple[str, int, int]] = [("seg", 0, len(text))]
    while work:
        kind, lo, hi = work.pop()
        if kind == "lit":
            out.append(")" if lo else "(")
            continue
        if lo == hi:
            continue
        mid = match[lo]
        # text[lo:hi] = "(" + A + ")" + B  ->  "(" + psi(B) + ")" + psi(A)
        work.append(("seg", lo + 1, mid))
        work.append(("lit", 1, 0))
        work.append(("seg", mid + 1, hi))
        work.append(("lit", 0, 0))
    return PlaneTree.from_parens("".join(out))


def _matching_indices(text: str) -> dict[int, int]:
    match: dict[int, int] = {}
    stack: list[int] = []
    for i, ch in enumerate(text):
        if ch == "(":
            stack.append(i)
        else:
            match[stack.pop()] = i
    return match


def leftmost_path_length(tree: PlaneTree) -> int:
    """Edges on the all-first-children path from the root."""
    down = tree.down_degrees
    length = 0
    v = 0
    while down[v] > 0:
        v += 1  # first child of v is the next preorder vertex
        length += 1
    return length


def leaves_with_left_sibling(tree: PlaneTree) -> int:
    # in preorder the first child of p is p + 1, so i has a left sibling
    # exactly when i != parent[i] + 1
    par = tree.parent
    down = tree.down_degrees
    return sum(
        1 for i in range(1, par.size) if down[i] == 0 and i != par[i] + 1
    )


def to_parens(tree: PlaneTree) -> str:
    return tree.to_parens()


def from_parens(text: str) -> PlaneTree:
    return PlaneTree.from_parens(text)
