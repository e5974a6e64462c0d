"""Shared parameter containers for the Gibbs weighting of plane trees.

A tree with ``d0`` leaves, ``d1`` internal vertices (non-root, down-degree 1)
and root degree ``r`` carries energy ``alpha*d0 + beta*d1 + gamma*r`` and
Boltzmann weight ``a**d0 * b**d1 * c**r`` with ``a = exp(-alpha)`` etc.

Weights may be floats or exact rationals; every downstream routine that can
run exactly does so when the weights (and any toll coefficients) are
`Fraction`/`int` valued.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational


def _is_exact(x) -> bool:
    return isinstance(x, Rational)


@dataclass(frozen=True)
class ThermoParams:
    """Energy coefficients (alpha, beta, gamma) for leaves / internal / root."""

    alpha: float
    beta: float
    gamma: float = 0.0

    def weights(self) -> "WeightTriple":
        return WeightTriple(
            math.exp(-self.alpha), math.exp(-self.beta), math.exp(-self.gamma)
        )


@dataclass(frozen=True)
class WeightTriple:
    """Multiplicative weights (a, b, c) per leaf / internal vertex / root edge.

    Entries must be positive.  `Fraction` (or int) entries switch exact
    routines into rational arithmetic; floats keep everything in float64.
    """

    a: float | Fraction
    b: float | Fraction
    c: float | Fraction = 1

    def __post_init__(self):
        for name in ("a", "b", "c"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"weight {name} must be positive, got {value!r}")

    @classmethod
    def from_thermo(cls, params: ThermoParams) -> "WeightTriple":
        return params.weights()

    @property
    def is_exact(self) -> bool:
        return all(_is_exact(v) for v in (self.a, self.b, self.c))

    def as_fractions(self) -> "WeightTriple":
        if not self.is_exact:
            raise ValueError("weights are floats; no exact representation")
        return WeightTriple(Fraction(self.a), Fraction(self.b), Fraction(self.c))

    def as_floats(self) -> tuple[float, float, float]:
        return float(self.a), float(self.b), float(self.c)


def coerce_weights(p) -> WeightTriple:
    """Accept ThermoParams, WeightTriple, or an (a, b, c) tuple."""
    if isinstance(p, WeightTriple):
        return p
    if isinstance(p, ThermoParams):
        return p.weights()
    if isinstance(p, (tuple, list)) and len(p) == 3:
        return WeightTriple(*p)
    raise TypeError(f"cannot interpret {p!r} as Gibbs weights")
