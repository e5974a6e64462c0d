"""Scaling analysis for polynomial tolls.

The growth rate of a subtree-additive property is governed by the
degrees of the toll's leading monomials: total degree sets the exponent,
and the exponents tied to leaf and internal counts set an explicit
multiplier relating Gibbs means at (alpha, beta) to uniform means.
:func:`analyze_toll` extracts the degree data, :func:`q_constant` the
multiplier, and :func:`predict_limit` packages both with the reference
limit shape.

The multiplier only exists when every leading monomial scales the same
way; mixed tolls raise :class:`HypothesisViolated` instead of returning
a number that nothing converges to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .properties import PolynomialToll, parse_toll
from .series import rho

__all__ = [
    "TollAnalysis",
    "LimitPrediction",
    "HypothesisViolated",
    "analyze_toll",
    "q_constant",
    "q_k",
    "predict_limit",
    "predict_mean_ratio",
]


class HypothesisViolated(ValueError):
    """The toll's leading monomials do not share one scaling group.

    ``group_degrees`` lists the distinct (size, leaf, internal) degree
    triples found among maximal monomials.
    """

    def __init__(self, message: str, group_degrees):
        super().__init__(message)
        self.group_degrees = tuple(group_degrees)


@dataclass(frozen=True)
class TollAnalysis:
    """Degree data controlling how a toll's property sum scales with n.

    ``delta`` is the maximum total degree over monomials.  For the
    maximal monomials, exponents are pooled into three groups: size
    (t, n), leaf counts (l0, L0), internal counts (l1, L1).  When every
    maximal monomial lands on the same triple, ``uniform`` is True and
    the per-group degrees are recorded; otherwise they are None and
    ``group_degrees`` lists the competing triples.
    """

    toll: str
    delta: int
    delta_n: int | None
    delta_d0: int | None
    delta_d1: int | None
    subtree_positive: bool
    uniform: bool
    group_degrees: tuple[tuple[int, int, int], ...]

    @property
    def v_prime(self) -> Fraction:
        """Exponent: P/n^v_prime has a nondegenerate limit."""
        if self.subtree_positive:
            return Fraction(2 * self.delta + 1, 2)
        return Fraction(self.delta + 1)

    def v_k(self, k: int) -> Fraction:
        """Singularity exponent of the k-th moment series; satisfies
        v_prime * k = v_k + 1/2."""
        if k < 1:
            raise ValueError("k must be >= 1")
        if self.subtree_positive:
            return Fraction((2 * self.delta + 1) * k - 1, 2)
        return Fraction(2 * (self.delta + 1) * k - 1, 2)


def _as_toll(f) -> PolynomialToll:
    if isinstance(f, PolynomialToll):
        return f
    return parse_toll(f)


def analyze_toll(f) -> TollAnalysis:
    """Degree statistics of a toll (given as PolynomialToll or text)."""
    toll = _as_toll(f)
    if toll.is_zero:
        raise ValueError("cannot analyze the zero toll")
    degrees = {e: sum(e) for e in toll.monomials}
    delta = max(degrees.values())
    maximal = [e for e, d in degrees.items() if d == delta]
    # exponent order: (t, l0, l1, n, L0, L1)
    subtree_positive = all(e[0] + e[1] + e[2] > 0 for e in maximal)
    triples = sorted({(e[0] + e[3], e[1] + e[4], e[2] + e[5]) for e in maximal})
    uniform = len(triples) == 1
    dn, dd0, dd1 = triples[0] if uniform else (None, None, None)
    return TollAnalysis(
        toll=toll.text,
        delta=delta,
        delta_n=dn,
        delta_d0=dd0,
        delta_d1=dd1,
        subtree_positive=subtree_positive,
        uniform=uniform,
        group_degrees=tuple(triples),
    )


def _analysis(f) -> TollAnalysis:
    return f if isinstance(f, TollAnalysis) else analyze_toll(f)


def _require_uniform(an: TollAnalysis) -> None:
    if not an.uniform:
        raise HypothesisViolated(
            f"toll {an.toll!r}: maximal monomials fall in different scaling "
            f"groups {list(an.group_degrees)}, so no single limit constant "
            "exists",
            an.group_degrees,
        )


def _bracket(an: TollAnalysis, alpha: float, beta: float) -> float:
    """The weight-dependent factor shared by q_constant and q_k."""
    r = rho(alpha, beta)
    d0, d1 = an.delta_d0, an.delta_d1
    ea2 = math.exp(-alpha / 2)
    if an.subtree_positive:
        return (
            (ea2 + 1) ** (d0 - 1)
            * math.exp(-(alpha / 4) * (2 * d0 - 1))
            * math.exp(-beta * d1)
            / math.sqrt(r ** (2 * d0 + 2 * d1 - 1))
        )
    return (
        (ea2 + 1) ** d0
        * math.exp(-alpha * d0 / 2)
        * math.exp(-beta * d1)
        / r ** (d0 + d1)
    )


def q_constant(f, alpha: float, beta: float) -> float:
    """Limiting ratio of Gibbs (alpha, beta, 0) means to uniform means,
    for the property summing toll ``f`` over subtrees.

    Equals 1 at (0, 0) for every admissible toll.  Raises
    :class:`HypothesisViolated` when the toll mixes scaling groups.
    """
    an = _analysis(f)
    _require_uniform(an)
    return 2.0 ** (an.delta_d0 + 2 * an.delta_d1) * _bracket(an, alpha, beta)


def q_k(f, k: int, alpha: float, beta: float) -> float:
    """Constant attached to the k-th moment's singular term.

    The combination (q_k(1)@(0,0) / q_k(f)@(0,0)) * (q_k(f)@(a,b) /
    q_k(1)@(a,b)) equals q_constant(f, a, b)**k for every k.
    """
    an = _analysis(f)
    _require_uniform(an)
    if k < 1:
        raise ValueError("k must be >= 1")
    lead = math.sqrt(rho(alpha, beta) * math.exp(-alpha / 2))
    return lead * _bracket(an, alpha, beta) ** k


@dataclass(frozen=True)
class LimitPrediction:
    """Predicted large-n behaviour of a property's Gibbs mean.

    ``reference`` tags the limit shape: "airy" for linear subtree tolls,
    "excursion-double-integral" for higher-degree subtree tolls,
    "degenerate" when the property concentrates (no subtree variable in
    the lead).
    """

    toll: str
    alpha: float
    beta: float
    v_prime: Fraction
    q: float
    reference: str

    def describe(self) -> dict:
        return {
            "toll": self.toll,
            "alpha": self.alpha,
            "beta": self.beta,
            "v_prime": str(self.v_prime),
            "q": self.q,
            "reference": self.reference,
        }


def predict_limit(f, alpha: float, beta: float) -> LimitPrediction:
    """Exponent, multiplier, and limit-shape tag for a toll."""
    an = _analysis(f)
    _require_uniform(an)
    if not an.subtree_positive:
        reference = "degenerate"
    elif an.delta == 1:
        reference = "airy"
    else:
        reference = "excursion-double-integral"
    return LimitPrediction(
        toll=an.toll,
        alpha=alpha,
        beta=beta,
        v_prime=an.v_prime,
        q=q_constant(an, alpha, beta),
        reference=reference,
    )


def predict_mean_ratio(f, alpha: float, beta: float) -> float:
    """Predicted limit of E_(alpha,beta,0)[P] / E_(0,0,0)[P] at equal n."""
    return predict_limit(f, alpha, beta).q
