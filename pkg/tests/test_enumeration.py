from fractions import Fraction

import pytest

from planetrees.counting import catalan
from planetrees.enumeration import (
    DEFAULT_GUARD,
    enumerate_trees,
    exact_distribution,
    exact_moment_table,
    exact_moments,
    exact_partition,
    iter_parens,
)
from planetrees.properties import parse_toll
from planetrees.trees import PlaneTree
from planetrees.weights import ThermoParams, WeightTriple

UNIFORM = ThermoParams(0.0, 0.0, 0.0)
RATIONAL = WeightTriple(Fraction(1, 2), Fraction(1, 3), Fraction(2))


def test_iter_parens_small():
    assert list(iter_parens(0)) == [""]
    assert list(iter_parens(1)) == ["()"]
    assert list(iter_parens(2)) == ["(())", "()()"]
    assert list(iter_parens(3)) == ["((()))", "(()())", "(())()", "()(())", "()()()"]


@pytest.mark.parametrize("n", range(0, 9))
def test_iter_parens_counts_and_order(n):
    seen = list(iter_parens(n))
    assert len(seen) == catalan(n)
    assert len(set(seen)) == len(seen)
    assert seen == sorted(seen)  # lexicographic with "(" < ")"


def test_enumerate_trees_round_trip():
    for t in enumerate_trees(4):
        assert PlaneTree.from_parens(t.to_parens()) == t


def test_guard_blocks_large_enumerations():
    with pytest.raises(ValueError, match="exceeds the enumeration guard"):
        list(iter_parens(DEFAULT_GUARD + 1))
    with pytest.raises(ValueError, match="exceeds the enumeration guard"):
        enumerate_trees(30, guard=10)
    # guard=None lifts the limit (first item is enough; the full walk is huge)
    assert next(iter(iter_parens(17, guard=None))) == "(" * 17 + ")" * 17


def test_exact_partition_rational_weights():
    # n = 3 masses: chain 2/18, cherry-on-stick 9/18, two mixed 6/18, star 18/18
    assert exact_partition(3, RATIONAL) == Fraction(41, 18)


def test_exact_distribution_rational_masses():
    dist = exact_distribution(3, RATIONAL)
    probs = dist.probabilities()
    assert probs == {
        "((()))": Fraction(2, 41),
        "(()())": Fraction(9, 41),
        "(())()": Fraction(6, 41),
        "()(())": Fraction(6, 41),
        "()()()": Fraction(18, 41),
    }
    assert sum(probs.values()) == 1


def test_exact_distribution_uniform_counts():
    dist = exact_distribution(4, UNIFORM)
    probs = dist.probabilities()
    assert len(probs) == catalan(4)
    assert all(p == pytest.approx(1 / 14) for p in probs.values())
    assert dist.partition == pytest.approx(14.0)


def test_toll_distribution_uniform_path_length():
    dist = exact_distribution(3, UNIFORM, toll=parse_toll("t+1"))
    assert dist.probabilities() == {
        Fraction(6): pytest.approx(0.2),
        Fraction(5): pytest.approx(0.2),
        Fraction(4): pytest.approx(0.4),
        Fraction(3): pytest.approx(0.2),
    }
    assert dist.support() == sorted(dist.probabilities())
    assert dist.mean() == pytest.approx(Fraction(22, 5))


def test_moments_match_weighted_sums():
    toll = parse_toll("t+1")
    first, second = exact_moments(3, UNIFORM, toll, k_max=2)
    assert first == pytest.approx(4.4)
    assert second == pytest.approx((36 + 25 + 16 + 16 + 9) / 5)


def test_moment_table_shares_one_enumeration_pass():
    tolls = [parse_toll("t+1"), parse_toll("n")]
    moments, partitions = exact_moment_table(
        3, [UNIFORM, RATIONAL], tolls, k_max=2
    )
    assert partitions[0] == pytest.approx(5.0)
    assert partitions[1] == Fraction(41, 18)
    for i, params in enumerate((UNIFORM, RATIONAL)):
        for j, toll in enumerate(tolls):
            singular = exact_moments(3, params, toll, k_max=2)
            assert moments[i][j][0] == pytest.approx(singular[0])
            assert moments[i][j][1] == pytest.approx(singular[1])


def test_root_bound_filters_support():
    dist = exact_distribution(3, UNIFORM, toll=parse_toll("t+1"), root_max=1)
    assert dist.probabilities() == {
        Fraction(6): pytest.approx(0.5),
        Fraction(5): pytest.approx(0.5),
    }
    assert dist.partition == pytest.approx(2.0)


def test_empty_root_bound_rejected():
    with pytest.raises(ValueError, match="root bound"):
        exact_distribution(3, UNIFORM, root_max=0)


def test_probability_lookup():
    dist = exact_distribution(2, UNIFORM)
    assert dist.probability("(())") == pytest.approx(0.5)
    assert dist.probability("()()") == pytest.approx(0.5)


def test_gamma_tilts_root_degree():
    # gamma < 0 means c > 1: higher root degrees gain mass
    tilted = exact_distribution(3, ThermoParams(0.0, 0.0, -1.0))
    flat = exact_distribution(3, UNIFORM)
    star, chain = "()()()", "((()))"
    assert tilted.probability(star) > flat.probability(star)
    assert tilted.probability(chain) < flat.probability(chain)
