from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planetrees.counting import (
    catalan,
    classify_region,
    count_by_internal,
    count_by_leaves,
    count_by_root,
    count_full,
    count_kr,
    count_mk,
    leaves_with_left_sibling,
    leftmost_path_length,
    motzkin,
    psi,
)
from planetrees.enumeration import iter_parens
from planetrees.trees import PlaneTree, join


def exhaustive_histogram(n):
    hist = Counter()
    for text in iter_parens(n):
        t = PlaneTree.from_parens(text)
        s = t.stats()
        hist[(s.internal, s.leaves, s.root_degree)] += 1
    return hist


def test_catalan_values():
    assert [catalan(n) for n in range(9)] == [1, 1, 2, 5, 14, 42, 132, 429, 1430]


def test_motzkin_values():
    assert [motzkin(n) for n in range(9)] == [1, 1, 2, 4, 9, 21, 51, 127, 323]


def test_leaf_counts_are_narayana():
    # n = 5: 1, 10, 20, 10, 1
    assert [count_by_leaves(5, k) for k in range(1, 6)] == [1, 10, 20, 10, 1]
    for n in range(1, 9):
        assert sum(count_by_leaves(n, k) for k in range(1, n + 1)) == catalan(n)


def test_root_counts_sum_to_catalan():
    for n in range(1, 9):
        assert sum(count_by_root(n, r) for r in range(1, n + 1)) == catalan(n)
    assert count_by_root(5, 5) == 1  # the root-star tree


def test_internal_counts_involve_motzkin():
    # zero internal vertices: every non-root vertex branches or stops
    for n in range(1, 9):
        assert count_by_internal(n, 0) == motzkin(n - 1)
        assert sum(count_by_internal(n, m) for m in range(n)) == catalan(n)


@pytest.mark.parametrize("n", range(1, 9))
def test_joint_counts_match_enumeration(n):
    hist = exhaustive_histogram(n)
    for m in range(0, n + 1):
        for k in range(0, n + 1):
            for r in range(1, n + 1):
                assert count_full(n, m, k, r) == hist.get((m, k, r), 0), (n, m, k, r)
    mk = Counter()
    kr = Counter()
    for (m, k, r), c in hist.items():
        mk[(m, k)] += c
        kr[(k, r)] += c
    for m in range(0, n + 1):
        for k in range(0, n + 1):
            assert count_mk(n, m, k) == mk.get((m, k), 0)
    for k in range(0, n + 1):
        for r in range(1, n + 1):
            assert count_kr(n, k, r) == kr.get((k, r), 0)


def test_classify_region_cases():
    # interior: more leaves than the root degree, slack in the path count
    assert classify_region(6, 1, 3, 2) == "interior"
    # every branch a bare path: k = r and n - m = k
    assert classify_region(6, 4, 2, 2) == "path-forest"
    assert classify_region(6, 1, 2, 3) == "empty"  # k < r is impossible
    assert count_full(6, 1, 2, 3) == 0


def test_path_forest_counts():
    # r path branches partition n edges with m non-top vertices marked
    for n in range(2, 9):
        for r in range(1, n + 1):
            m = n - r  # all non-leaf non-root vertices internal
            assert classify_region(n, m, r, r) in ("path-forest", "empty")


@given(st.integers(1, 8))
@settings(max_examples=8, deadline=None)
def test_psi_is_an_involution(n):
    for text in iter_parens(n):
        t = PlaneTree.from_parens(text)
        assert psi(psi(t)) == t


@given(st.integers(1, 8))
@settings(max_examples=8, deadline=None)
def test_psi_translates_statistics(n):
    for text in iter_parens(n):
        t = PlaneTree.from_parens(text)
        s = t.stats()
        image = psi(t)
        assert leftmost_path_length(image) == s.root_degree
        assert leaves_with_left_sibling(image) == s.internal
        assert image.stats().leaves == n + 1 - s.leaves


def test_psi_swaps_join_order():
    t1 = PlaneTree.from_parens("(())")
    t2 = PlaneTree.from_parens("()()")
    lhs = psi(join(t1, t2))
    rhs = join(psi(t2), psi(t1))
    assert lhs == rhs


def test_out_of_range_counts_are_zero():
    assert count_by_leaves(0, 1) == 0
    assert count_by_root(5, 0) == 0
    assert count_full(5, -1, 2, 1) == 0
    assert count_mk(4, 5, 5) == 0


def test_negative_sizes_rejected():
    with pytest.raises(ValueError):
        catalan(-1)
    with pytest.raises(ValueError):
        motzkin(-2)
