"""Plane (rooted, ordered) trees stored as preorder parent arrays.

A tree on ``v`` vertices is a read-only int32 array ``parent`` of length
``v``: vertex ids are preorder positions, ``parent[0] == -1`` for the root,
and ``parent[i] < i``.  Every subtree occupies a contiguous index range,
which keeps slicing, joining and single-pass statistics cheap.

Vertex classification (root never classified):

* leaf      -- non-root vertex with down-degree 0
* internal  -- non-root vertex with down-degree 1

The *extended* convention additionally classifies the root of a subtree by
its own down-degree; it is what subtree-summed tolls use.
"""

from __future__ import annotations

import enum
from typing import Iterator, NamedTuple, Sequence

import numpy as np

__all__ = [
    "PlaneTree",
    "TreeStats",
    "SubtreeRecord",
    "Convention",
    "join",
    "unjoin",
    "stats",
    "subtree_records",
]


class Convention(enum.Enum):
    """How the root of a subtree is classified in per-subtree counts."""

    STANDARD = "standard"  # subtree root never counts as leaf/internal
    EXTENDED = "extended"  # subtree root counts by its own down-degree


class TreeStats(NamedTuple):
    edges: int
    leaves: int
    internal: int
    root_degree: int


class SubtreeRecord(NamedTuple):
    vertex: int
    edges: int
    leaves: int
    internal: int


class PlaneTree:
    """Immutable plane tree; vertex ids are preorder positions."""

    __slots__ = ("_parent", "_down")

    def __init__(self, parent: Sequence[int]):
        arr = np.asarray(parent, dtype=np.int32)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("parent array must be one-dimensional and non-empty")
        self._validate(arr)
        arr = arr.copy()
        arr.setflags(write=False)
        self._parent = arr
        self._down = None

    @staticmethod
    def _validate(arr: np.ndarray) -> None:
        if arr[0] != -1:
            raise ValueError("parent[0] must be -1 (root)")
        # parent[i] must lie on the rightmost path of the already-built tree,
        # otherwise the array is not a preorder listing of any plane tree.
        path = [0]
        for i in range(1, arr.size):
            p = arr[i]
            if not 0 <= p < i:
                raise ValueError(f"parent[{i}] = {p} out of range")
            while path and path[-1] != p:
                path.pop()
            if not path:
                raise ValueError(f"parent[{i}] = {p} breaks preorder contiguity")
            path.append(i)

    @classmethod
    def _trusted(cls, arr: np.ndarray) -> "PlaneTree":
        """Wrap an already-valid preorder parent array without re-checking."""
        t = cls.__new__(cls)
        arr.setflags(write=False)
        t._parent = arr
        t._down = None
        return t

    # -- basic shape ---------------------------------------------------

    @property
    def parent(self) -> np.ndarray:
        return self._parent

    @property
    def n_vertices(self) -> int:
        return self._parent.size

    @property
    def n_edges(self) -> int:
        return self._parent.size - 1

    @property
    def down_degrees(self) -> np.ndarray:
        """Number of children of each vertex (cached)."""
        if self._down is None:
            down = np.bincount(self._parent[1:], minlength=self.n_vertices)
            down = down.astype(np.int32)
            down.setflags(write=False)
            self._down = down
        return self._down

    @property
    def root_degree(self) -> int:
        return int(self.down_degrees[0])

    def stats(self) -> TreeStats:
        down = self.down_degrees[1:]
        return TreeStats(
            edges=self.n_edges,
            leaves=int(np.count_nonzero(down == 0)),
            internal=int(np.count_nonzero(down == 1)),
            root_degree=self.root_degree,
        )

    def depths(self) -> np.ndarray:
        """Edge-distance from the root, per vertex."""
        d = np.empty(self.n_vertices, dtype=np.int64)
        d[0] = 0
        par = self._parent
        for i in range(1, par.size):
            d[i] = d[par[i]] + 1
        return d

    def subtree_edge_counts(self) -> np.ndarray:
        """Edges below each vertex; entry 0 equals n_edges."""
        t = np.zeros(self.n_vertices, dtype=np.int64)
        par = self._parent
        for i in range(par.size - 1, 0, -1):
            t[par[i]] += t[i] + 1
        return t

    def children(self, v: int) -> list[int]:
        return [int(i) for i in np.nonzero(self._parent == v)[0]]

    def subtree(self, v: int) -> "PlaneTree":
        """The plane tree rooted at vertex ``v`` (rebased copy)."""
        if v == 0:
            return self
        par = self._parent
        end = v + 1
        while end < par.size and par[end] >= v:
            end += 1
        sub = par[v:end] - v
        sub[0] = -1
        return PlaneTree._trusted(sub.astype(np.int32))

    # -- equality / hashing / repr ------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, PlaneTree):
            return NotImplemented
        return self._parent.shape == other._parent.shape and bool(
            np.all(self._parent == other._parent)
        )

    def __hash__(self) -> int:
        return hash(self._parent.tobytes())

    def __repr__(self) -> str:
        if self.n_edges <= 24:
            return f"PlaneTree({self.to_parens()!r})"
        return f"PlaneTree(<{self.n_edges} edges>)"

    # -- balanced-parenthesis interchange format ----------------------

    def to_parens(self) -> str:
        """Balanced-parenthesis encoding; '(' descends into a child."""
        par = self._parent
        if par.size == 1:
            return ""
        depth = np.empty(par.size, dtype=np.int64)
        depth[0] = 0
        out: list[str] = []
        for i in range(1, par.size):
            depth[i] = depth[par[i]] + 1
            out.append("(")
            if i + 1 < par.size:
                out.append(")" * (depth[i] - depth[par[i + 1]]))
            else:
                out.append(")" * depth[i])
        return "".join(out)

    @classmethod
    def from_parens(cls, text: str) -> "PlaneTree":
        """Parse a balanced-parenthesis string; errors name the offending index."""
        parent = [-1]
        stack = [0]
        opens = []  # indices of currently-unclosed '('
        for i, ch in enumerate(text):
            if ch == "(":
                parent.append(stack[-1])
                stack.append(len(parent) - 1)
                opens.append(i)
            elif ch == ")":
                if len(stack) == 1:
                    raise ValueError(f"unmatched ')' at index {i}")
                stack.pop()
                opens.pop()
            else:
                raise ValueError(f"invalid character {ch!r} at index {i}")
        if opens:
            raise ValueError(f"unclosed '(' at index {opens[0]}")
        return cls._trusted(np.asarray(parent, dtype=np.int32))

    # -- nested-sequence form (test-friendly) --------------------------

    @classmethod
    def from_nested(cls, nested) -> "PlaneTree":
        """Build from nested sequences: ``[]`` is a single vertex,
        ``[c1, c2, ...]`` a root with child subtrees ``c1, c2, ...``."""
        parent = [-1]
        # explicit stack, children pushed right-to-left to preserve preorder
        work = [(0, child) for child in reversed(list(nested))]
        while work:
            v, node = work.pop()
            parent.append(v)
            w = len(parent) - 1
            work.extend((w, child) for child in reversed(list(node)))
        return cls._trusted(np.asarray(parent, dtype=np.int32))

    def to_nested(self) -> list:
        par = self._parent
        nodes: list[list] = [[] for _ in range(par.size)]
        for i in range(1, par.size):
            nodes[par[i]].append(nodes[i])
        return nodes[0]

    def __iter__(self) -> Iterator["PlaneTree"]:
        """Iterate over the child subtrees of the root, left to right."""
        for v in self.children(0):
            yield self.subtree(v)


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------


def stats(tree: PlaneTree) -> TreeStats:
    return tree.stats()


def join(base: PlaneTree, attached: PlaneTree) -> PlaneTree:
    """Graft ``attached`` under a new leftmost root edge of ``base``.

    The result has ``base.n_edges + attached.n_edges + 1`` edges; the new
    leftmost child subtree of the root is ``attached``.
    """
    v1, v2 = base.n_vertices, attached.n_vertices
    out = np.empty(v1 + v2, dtype=np.int32)
    out[0] = -1
    out[1] = 0
    out[2 : v2 + 1] = attached.parent[1:] + 1
    rest = base.parent[1:].copy()
    rest[rest > 0] += v2
    out[v2 + 1 :] = rest
    return PlaneTree._trusted(out)


def unjoin(tree: PlaneTree) -> tuple[PlaneTree, PlaneTree]:
    """Inverse of :func:`join`: split off the leftmost root subtree.

    Returns ``(base, attached)`` with ``tree == join(base, attached)``.
    Raises ``ValueError`` on the single-vertex tree, which has no edge to
    remove.
    """
    if tree.n_edges == 0:
        raise ValueError("cannot unjoin a single-vertex tree")
    par = tree.parent
    end = 2
    while end < par.size and par[end] >= 1:
        end += 1
    attached = par[1:end] - 1
    attached[0] = -1
    base = np.concatenate(([np.int32(-1)], par[end:]))
    base[1:][base[1:] > 0] -= end - 1
    return (
        PlaneTree._trusted(base.astype(np.int32)),
        PlaneTree._trusted(attached.astype(np.int32)),
    )


def subtree_records(
    tree: PlaneTree, convention: Convention = Convention.STANDARD
) -> list[SubtreeRecord]:
    """Per-vertex subtree statistics, in vertex (preorder) order.

    Record ``i`` describes the subtree rooted at vertex ``i``: its edge
    count and its leaf/internal counts under ``convention``.  Subtree sums
    in property evaluation run over records ``1:`` (non-root vertices).
    """
    par = tree.parent
    down = tree.down_degrees
    v = par.size
    t = np.zeros(v, dtype=np.int64)
    l0 = np.zeros(v, dtype=np.int64)
    l1 = np.zeros(v, dtype=np.int64)
    # reverse preorder: children are complete before their parent
    for i in range(v - 1, 0, -1):
        p = par[i]
        t[p] += t[i] + 1
        l0[p] += l0[i] + (1 if down[i] == 0 else 0)
        l1[p] += l1[i] + (1 if down[i] == 1 else 0)
    if convention is Convention.EXTENDED:
        l0 = l0 + (down == 0)
        l1 = l1 + (down == 1)
    elif convention is not Convention.STANDARD:
        raise TypeError(f"unknown convention: {convention!r}")
    return [
        SubtreeRecord(i, int(t[i]), int(l0[i]), int(l1[i])) for i in range(v)
    ]
