import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planetrees.trees import (
    Convention,
    PlaneTree,
    TreeStats,
    join,
    subtree_records,
    unjoin,
)

# a cherry hanging off the root plus a separate leaf: (()())()
CHERRY = PlaneTree([-1, 0, 1, 1, 0])

nested = st.recursive(
    st.just(()), lambda kids: st.lists(kids, max_size=4).map(tuple), max_leaves=24
)
trees = nested.map(PlaneTree.from_nested)


def test_single_vertex():
    t = PlaneTree([-1])
    assert t.n_vertices == 1 and t.n_edges == 0
    assert t.root_degree == 0
    assert t.to_parens() == ""
    assert t.stats() == TreeStats(0, 0, 0, 0)


def test_stats_by_hand():
    # vertices: root, child a (down 2), two grandchildren, child b (leaf)
    assert CHERRY.stats() == TreeStats(edges=4, leaves=3, internal=0, root_degree=2)
    assert list(CHERRY.down_degrees) == [2, 2, 0, 0, 0]
    assert list(CHERRY.depths()) == [0, 1, 2, 2, 1]
    assert list(CHERRY.subtree_edge_counts()) == [4, 2, 0, 0, 0]


def test_parent_array_is_read_only():
    with pytest.raises(ValueError):
        CHERRY.parent[0] = 3


@pytest.mark.parametrize(
    "bad",
    [
        [0],  # root must have parent -1
        [-1, 1],  # self loop
        [-1, 2, 0],  # forward reference
        [-1, 0, 0, 1],  # vertex 3 attaches to 1 after its subtree closed
    ],
)
def test_invalid_parent_arrays_rejected(bad):
    with pytest.raises(ValueError):
        PlaneTree(bad)


@pytest.mark.parametrize(
    "text", ["", "()", "(())", "()()", "(()())()", "((()))(()())"]
)
def test_parens_round_trip(text):
    assert PlaneTree.from_parens(text).to_parens() == text


def test_from_parens_error_messages():
    with pytest.raises(ValueError, match="unmatched"):
        PlaneTree.from_parens("())")
    with pytest.raises(ValueError, match="unclosed"):
        PlaneTree.from_parens("(()")
    with pytest.raises(ValueError, match="invalid character"):
        PlaneTree.from_parens("(x)")


def test_nested_round_trip():
    shape = [[], [[], [[]]], []]
    t = PlaneTree.from_nested(shape)
    assert t.to_nested() == shape
    assert t.n_edges == 6


def test_children_and_subtree():
    assert CHERRY.children(0) == [1, 4]
    assert CHERRY.children(1) == [2, 3]
    sub = CHERRY.subtree(1)
    assert sub.to_parens() == "()()"
    assert CHERRY.subtree(4).n_vertices == 1


def test_iter_yields_root_branches():
    branches = [b.to_parens() for b in CHERRY]
    assert branches == ["()()", ""]


def test_equality_and_hash():
    again = PlaneTree.from_parens("(()())()")
    assert again == CHERRY and hash(again) == hash(CHERRY)
    assert again != PlaneTree.from_parens("()(()())")


def test_join_places_attached_leftmost():
    base = PlaneTree.from_parens("()")
    attached = PlaneTree.from_parens("()")
    j = join(base, attached)
    assert j.to_parens() == "(())()"
    left, right = unjoin(j)
    assert left == base and right == attached


def test_unjoin_requires_an_edge():
    with pytest.raises(ValueError):
        unjoin(PlaneTree([-1]))


@given(trees, trees)
@settings(max_examples=60, deadline=None)
def test_join_unjoin_inverse(t1, t2):
    j = join(t1, t2)
    assert j.n_edges == t1.n_edges + t2.n_edges + 1
    assert j.root_degree == t1.root_degree + 1
    a, b = unjoin(j)
    assert a == t1 and b == t2


@given(trees)
@settings(max_examples=60, deadline=None)
def test_unjoin_join_inverse(t):
    if t.n_edges == 0:
        return
    a, b = unjoin(t)
    assert join(a, b) == t


@given(trees)
@settings(max_examples=60, deadline=None)
def test_parens_nested_round_trips(t):
    assert PlaneTree.from_parens(t.to_parens()) == t
    assert PlaneTree.from_nested(t.to_nested()) == t


@given(trees)
@settings(max_examples=60, deadline=None)
def test_stats_consistency(t):
    s = t.stats()
    down = t.down_degrees
    assert s.edges == t.n_vertices - 1
    assert s.leaves == int((down[1:] == 0).sum())
    assert s.internal == int((down[1:] == 1).sum())
    assert s.root_degree == down[0]
    # non-root vertices of down degree >= 2 make up the rest
    assert s.leaves + s.internal <= s.edges


@given(trees)
@settings(max_examples=40, deadline=None)
def test_subtree_records_conventions(t):
    ext = subtree_records(t, Convention.EXTENDED)
    std = subtree_records(t, Convention.STANDARD)
    assert len(ext) == len(std) == t.n_vertices
    for v in range(1, t.n_vertices):
        sub = t.subtree(v)
        s = sub.stats()
        own = sub.down_degrees[0]
        assert ext[v].edges == std[v].edges == s.edges
        # extended counts classify the subtree root by its own down degree
        assert ext[v].leaves == s.leaves + (1 if own == 0 else 0)
        assert ext[v].internal == s.internal + (1 if own == 1 else 0)
        assert std[v].leaves == s.leaves
        assert std[v].internal == s.internal
    whole = t.stats()
    root_down = int(t.down_degrees[0])
    assert std[0].leaves == whole.leaves
    assert std[0].internal == whole.internal
    # at the root, extended additionally classifies the root itself
    assert ext[0].leaves == whole.leaves + (1 if root_down == 0 else 0)
    assert ext[0].internal == whole.internal + (1 if root_down == 1 else 0)


def test_repr_mentions_shape():
    assert "(()())()" in repr(CHERRY) or "PlaneTree" in repr(CHERRY)


def test_depths_match_parent_chain():
    t = PlaneTree.from_parens("((()))(())")
    d = t.depths()
    par = t.parent
    for v in range(1, t.n_vertices):
        assert d[v] == d[par[v]] + 1
    assert d.dtype == np.int64 or d.dtype == np.int32
