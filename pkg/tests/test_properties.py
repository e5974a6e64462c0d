from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planetrees.properties import (
    NAMED_TOLLS,
    AdditiveProperty,
    L0_,
    PolynomialToll,
    eval_additive,
    eval_polynomial_toll,
    internal_root_distance,
    l0_,
    l1_,
    leaf_root_distance,
    n_,
    parse_toll,
    path_length,
    t_,
    wiener_index,
)
from planetrees.trees import PlaneTree, join

nested = st.recursive(
    st.just(()),
    lambda kids: st.lists(kids, max_size=4).map(tuple),
    max_leaves=20,
)
trees = nested.map(PlaneTree.from_nested)


def test_parse_simple_sum():
    toll = parse_toll("t + 1")
    assert toll.monomials == {
        (1, 0, 0, 0, 0, 0): Fraction(1),
        (0, 0, 0, 0, 0, 0): Fraction(1),
    }
    assert toll.is_exact


def test_parse_precedence_and_powers():
    # ** binds tighter than *, and ^ is an alias
    assert parse_toll("2*t**2").monomials == {(2, 0, 0, 0, 0, 0): Fraction(2)}
    assert parse_toll("t^2") == parse_toll("t**2")
    assert parse_toll("-t**2").monomials == {(2, 0, 0, 0, 0, 0): Fraction(-1)}


def test_parse_products_expand():
    toll = parse_toll("(t+1)*(n-t)")
    assert toll.monomials == {
        (1, 0, 0, 1, 0, 0): Fraction(1),
        (2, 0, 0, 0, 0, 0): Fraction(-1),
        (0, 0, 0, 1, 0, 0): Fraction(1),
        (1, 0, 0, 0, 0, 0): Fraction(-1),
    }


def test_parse_rational_coefficients():
    assert parse_toll("3/2 * t").monomials == {(1, 0, 0, 0, 0, 0): Fraction(3, 2)}


@pytest.mark.parametrize(
    "text, message",
    [
        ("t +", "unexpected end"),
        ("q + 1", "unknown symbol 'q'"),
        ("(t+1", "unexpected end"),
        ("1..5*t", "trailing input"),
    ],
)
def test_parse_errors(text, message):
    with pytest.raises(ValueError, match=message):
        parse_toll(text)


def test_symbol_arithmetic_matches_parser():
    built = t_ * t_ + 2 * n_ - l0_ / 2
    assert built == parse_toll("t**2 + 2*n - l0/2")
    assert (t_ - t_).is_zero
    assert not (t_ + l1_ + L0_).is_zero


def test_zero_coefficients_dropped():
    toll = PolynomialToll({(1, 0, 0, 0, 0, 0): 0, (0, 0, 0, 0, 0, 0): 2})
    assert toll.monomials == {(0, 0, 0, 0, 0, 0): Fraction(2)}


def test_bad_exponent_tuple_rejected():
    with pytest.raises(ValueError, match="bad exponent tuple"):
        PolynomialToll({(1, 0): 1})
    with pytest.raises(ValueError, match="bad exponent tuple"):
        PolynomialToll({(1, 0, 0, 0, 0, -1): 1})


def test_float_coefficient_loses_exactness():
    toll = 0.5 * t_
    assert not toll.is_exact
    # subtrees of "(())" have 1 and 0 edges
    assert toll(PlaneTree.from_parens("(())")) == pytest.approx(0.5)


def test_named_tolls_registry():
    assert set(NAMED_TOLLS) == {
        "edges",
        "path-length",
        "wiener",
        "leaf-depth",
        "internal-depth",
    }
    assert NAMED_TOLLS["path-length"] == parse_toll("t + 1")
    assert NAMED_TOLLS["wiener"] == parse_toll("(t+1)*(n-t)")


def test_path_length_small_cases():
    assert path_length(PlaneTree.from_parens("()")) == 1
    assert path_length(PlaneTree.from_parens("(())")) == 3
    assert path_length(PlaneTree.from_parens("()()")) == 2
    assert path_length(PlaneTree.from_parens("(()())")) == 5


def test_wiener_small_cases():
    # sum over unordered vertex pairs of their graph distance
    assert wiener_index(PlaneTree.from_parens("()")) == 1
    assert wiener_index(PlaneTree.from_parens("(())")) == 4
    assert wiener_index(PlaneTree.from_parens("()()")) == 4


def test_root_distance_sums():
    t = PlaneTree.from_parens("((())())")  # internal at depth 1, leaves deeper
    depths = t.depths()
    dd = t.down_degrees
    leaf_sum = sum(int(d) for v, d in enumerate(depths) if v and dd[v] == 0)
    internal_sum = sum(int(d) for v, d in enumerate(depths) if v and dd[v] == 1)
    assert leaf_root_distance(t) == leaf_sum
    assert internal_root_distance(t) == internal_sum


@given(trees)
@settings(max_examples=60, deadline=None)
def test_fast_evaluators_match_polynomials(t):
    assert path_length(t) == eval_polynomial_toll(NAMED_TOLLS["path-length"], t)
    assert wiener_index(t) == eval_polynomial_toll(NAMED_TOLLS["wiener"], t)
    assert leaf_root_distance(t) == eval_polynomial_toll(NAMED_TOLLS["leaf-depth"], t)
    assert internal_root_distance(t) == eval_polynomial_toll(
        NAMED_TOLLS["internal-depth"], t
    )


@given(trees)
@settings(max_examples=60, deadline=None)
def test_toll_call_and_eval_agree(t):
    toll = parse_toll("t*l0 + 2*l1 + n")
    assert toll(t) == eval_polynomial_toll(toll, t)


@given(trees)
@settings(max_examples=40, deadline=None)
def test_edges_toll_counts_edges(t):
    assert NAMED_TOLLS["edges"](t) == t.n_edges


def test_additive_grafting_recursion():
    prop = AdditiveProperty(toll=lambda sub: sub.n_edges + 1, name="pl")
    t1 = PlaneTree.from_parens("(())")
    t2 = PlaneTree.from_parens("()()")
    joined = join(t1, t2)
    assert prop(joined) == prop(t1) + prop(t2) + (t2.n_edges + 1)
    assert prop(PlaneTree([-1])) == 0


def test_additive_base_counts_vertices():
    prop = AdditiveProperty(toll=lambda sub: 0, base=1)
    t = PlaneTree.from_parens("(()())")
    assert eval_additive(prop, t) == t.n_vertices


@given(trees)
@settings(max_examples=40, deadline=None)
def test_path_length_is_additive_with_edge_toll(t):
    prop = AdditiveProperty(toll=lambda sub: sub.n_edges + 1)
    assert eval_additive(prop, t) == path_length(t)


def test_single_vertex_polynomial_value_is_zero():
    one = PlaneTree([-1])
    assert parse_toll("t**2 + n + 7")(one) == 0


def test_arrays_round_trip():
    toll = parse_toll("2*n - l0/2 + t**2")
    coefs, expos = toll.arrays()
    rebuilt = PolynomialToll(
        {tuple(int(e) for e in row): c for c, row in zip(coefs, expos)}
    )
    assert rebuilt.monomials.keys() == toll.monomials.keys()
