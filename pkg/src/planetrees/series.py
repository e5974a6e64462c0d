"""Size-indexed partition tables via generating-function recurrences.

``g[n]`` is the total Boltzmann mass ``sum a^leaves * b^internal`` over
plane trees with n edges, ``g1[n]`` the same restricted to root degree 1,
and ``z[n]`` the mass with the extra root factor ``c^root_degree``.  They
satisfy

    g1[n] = (a-1)*[n=1] + (b-1)*g1[n-1] + g[n-1]          (n >= 1)
    g[n]  = sum_{j=1..n} g1[j] * g[n-j]                   (n >= 1)
    z[n]  = [n=0] + c * sum_{j=1..n} g1[j] * z[n-j]

which is the convolution form of the quadratic recurrence
``G = 1 + x*G^2 + (a-1)*x*G + (b-1)*x*G*G1`` together with
``G1 = 1 - 1/G`` and ``Z = 1/(1 - c*G1)``.

Float tables store coefficients pre-multiplied by ``rho(a, b)^-n`` with
``rho = a + b + 2*sqrt(a)`` (the reciprocal of the dominant singularity),
so entries stay bounded out to n ~ 1e5.  Exact tables (rational weights)
keep raw `Fraction` values.  The scaled z-array diverges when c exceeds
the reciprocal of ``G1`` at the singularity (strongly negative root
energy); the build detects that and raises rather than returning inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .counting import catalan
from .weights import WeightTriple, coerce_weights

__all__ = [
    "SeriesTables",
    "build_tables",
    "rho",
    "rho_bar",
    "rho_from_weights",
    "rho_bar_from_weights",
    "gn_explicit",
    "partition_exact",
    "log_partition",
    "partition_asymptotic",
    "log_partition_asymptotic",
    "partition_ratio_to_asymptotic",
    "primary_recurrence_residual",
    "gstar_identity_residual",
    "closed_form_coefficients",
]


def rho_from_weights(a, b) -> float:
    """Exponential growth rate of g[n]: a + b + 2*sqrt(a)."""
    return float(a) + float(b) + 2.0 * math.sqrt(float(a))


def rho_bar_from_weights(a, b) -> float:
    return float(a) + float(b) - 2.0 * math.sqrt(float(a))


def rho(alpha: float, beta: float) -> float:
    return rho_from_weights(math.exp(-alpha), math.exp(-beta))


def rho_bar(alpha: float, beta: float) -> float:
    return rho_bar_from_weights(math.exp(-alpha), math.exp(-beta))


@dataclass(frozen=True)
class SeriesTables:
    """DP tables up to ``order``; entry n is the coefficient times
    ``scale**-n`` (scale is 1 in exact mode)."""

    weights: WeightTriple
    order: int
    scale: object  # float rho in float mode, Fraction(1) in exact mode
    exact: bool
    g1: object  # float64[order+1] or list[Fraction]
    g: object
    z: object

    def _unscale(self, scaled, n: int):
        if self.exact:
            return scaled[n]
        value = math.log(scaled[n]) + n * math.log(self.scale)
        try:
            return math.exp(value)
        except OverflowError:
            return math.inf

    def g_coefficient(self, n: int):
        return self._unscale(self.g, n)

    def g1_coefficient(self, n: int):
        if self.g1[n] == 0:
            return Fraction(0) if self.exact else 0.0
        return self._unscale(self.g1, n)

    def partition(self, n: int):
        """Total Gibbs mass at size n (root weight included)."""
        return self._unscale(self.z, n)

    def log_partition(self, n: int) -> float:
        if self.exact:
            value = Fraction(self.z[n])
            return math.log(value.numerator) - math.log(value.denominator)
        return math.log(self.z[n]) + n * math.log(self.scale)


def build_tables(params, order: int, exact: bool | None = None) -> SeriesTables:
    """Run the DP up to ``order`` edges.  ``exact`` defaults to whether the
    weights are rational."""
    w = coerce_weights(params)
    if order < 0:
        raise ValueError("order must be >= 0")
    if exact is None:
        exact = w.is_exact
    if exact:
        if not w.is_exact:
            raise ValueError("exact tables need rational weights")
        return _build_exact(w.as_fractions(), order)
    return _build_float(w, order)


def _build_exact(w: WeightTriple, order: int) -> SeriesTables:
    a, b, c = w.a, w.b, w.c
    g1 = [Fraction(0)] * (order + 1)
    g = [Fraction(0)] * (order + 1)
    z = [Fraction(0)] * (order + 1)
    g[0] = Fraction(1)
    z[0] = Fraction(1)
    for n in range(1, order + 1):
        g1[n] = (a - 1 if n == 1 else Fraction(0)) + (b - 1) * g1[n - 1] + g[n - 1]
        g[n] = sum(g1[j] * g[n - j] for j in range(1, n + 1))
        z[n] = c * sum(g1[j] * z[n - j] for j in range(1, n + 1))
    return SeriesTables(
        weights=w, order=order, scale=Fraction(1), exact=True, g1=g1, g=g, z=z
    )


def _build_float(w: WeightTriple, order: int) -> SeriesTables:
    a, b, c = w.as_floats()
    scale = rho_from_weights(a, b)
    inv = 1.0 / scale
    g1 = np.zeros(order + 1)
    g = np.zeros(order + 1)
    z = np.zeros(order + 1)
    g[0] = 1.0
    z[0] = 1.0
    for n in range(1, order + 1):
        g1[n] = inv * (
            ((a - 1.0) if n == 1 else 0.0) + (b - 1.0) * g1[n - 1] + g[n - 1]
        )
        g[n] = g1[1 : n + 1] @ g[n - 1 :: -1]
        z[n] = c * (g1[1 : n + 1] @ z[n - 1 :: -1])
    if not np.isfinite(z).all():
        raise ValueError(
            "scaled z-table overflowed: the root weight c is past the "
            "pole of 1/(1 - c*G1); use exact rational tables, a smaller "
            "order, or a bounded root degree"
        )
    for arr in (g1, g, z):
        arr.setflags(write=False)
    return SeriesTables(
        weights=w, order=order, scale=scale, exact=False, g1=g1, g=g, z=z
    )


# ---------------------------------------------------------------------------
# explicit coefficient formula and closed-form cross-check
# ---------------------------------------------------------------------------


def gn_explicit(n: int, a, b):
    """Coefficient g[n] by the explicit finite sum (valid for n >= 2):

        2^-(n+1) * sum_k catalan(n-k) * C(n-k+1, k)
                          * (a+b)^(n-2k+1) * (4a - (a+b)^2)^k
    """
    if n < 2:
        raise ValueError("the explicit coefficient formula needs n >= 2")
    exact = isinstance(a, Rational) and isinstance(b, Rational)
    if exact:
        a, b = Fraction(a), Fraction(b)
    s = a + b
    disc = 4 * a - s * s
    total = 0
    for k in range(0, (n + 1) // 2 + 1):
        if n - 2 * k + 1 < 0:
            continue
        term = catalan(n - k) * math.comb(n - k + 1, k)
        total = total + term * s ** (n - 2 * k + 1) * disc**k
    if exact:
        return total / Fraction(2 ** (n + 1))
    return total / float(2 ** (n + 1))


def closed_form_coefficients(a: float, b: float, order: int) -> np.ndarray:
    """g[0..order] from the square-root closed form of the generating
    function, expanded as a power series (float validation path)."""
    p = -2.0 * (a + b)
    q = (2.0 - a - b) ** 2 + 4.0 * b - 4.0
    # s = sqrt(1 + p x + q x^2), s[n] from s*s matching term by term
    s = np.zeros(order + 2)
    s[0] = 1.0
    for n in range(1, order + 2):
        psi_n = p if n == 1 else (q if n == 2 else 0.0)
        conv = sum(s[j] * s[n - j] for j in range(1, n))
        s[n] = (psi_n - conv) / 2.0
    g = np.empty(order + 1)
    g[0] = 1.0
    for n in range(1, order + 1):
        g[n] = -s[n + 1] / 2.0
    return g


# ---------------------------------------------------------------------------
# identity residuals (used by tests and the verify battery)
# ---------------------------------------------------------------------------


def primary_recurrence_residual(tables: SeriesTables):
    """Max term-wise residual of G = 1 + x G^2 + (a-1) x G + (b-1) x G G1.

    Zero (exactly, in exact mode) when the DP is consistent.
    """
    w = tables.weights
    a, b = w.a, w.b
    if not tables.exact:
        a, b = float(a), float(b)
    g, g1 = tables.g, tables.g1
    inv_scale = 1 / tables.scale if not tables.exact else Fraction(1)
    worst = 0
    for n in range(tables.order + 1):
        rhs = 1 if n == 0 else 0
        if n >= 1:
            m = n - 1
            gg = sum(g[j] * g[m - j] for j in range(m + 1))
            gg1 = sum(g[j] * g1[m - j] for j in range(m + 1))
            rhs = rhs + inv_scale * (gg + (a - 1) * g[m] + (b - 1) * gg1)
        res = abs(g[n] - rhs)
        if res > worst:
            worst = res
    return worst


def gstar_identity_residual(tables: SeriesTables):
    """Max term-wise residual of G1 * G = G - 1 (i.e. G1 = 1 - 1/G)."""
    g, g1 = tables.g, tables.g1
    worst = abs(g1[0])
    for n in range(1, tables.order + 1):
        conv = sum(g1[j] * g[n - j] for j in range(n + 1))
        res = abs(conv - g[n])
        if res > worst:
            worst = res
    return worst


# ---------------------------------------------------------------------------
# partition values and the asymptotic comparison
# ---------------------------------------------------------------------------


def _tables_for(n: int, params, tables: SeriesTables | None, exact=None):
    w = coerce_weights(params)
    if tables is not None:
        if tables.weights != w:
            raise ValueError("supplied tables were built for different weights")
        if tables.order >= n:
            return tables
    return build_tables(w, n, exact=exact)


def partition_exact(n: int, params, tables: SeriesTables | None = None):
    """Gibbs partition value at size n via the DP (all root degrees).

    Equals the brute-force enumeration sum; unlike enumeration this is
    polynomial in n.  Returns a Fraction for rational weights.
    """
    return _tables_for(n, params, tables).partition(n)


def log_partition(n: int, params, tables: SeriesTables | None = None) -> float:
    return _tables_for(n, params, tables).log_partition(n)


def _check_gamma(gamma: float) -> None:
    if gamma != 0.0:
        raise ValueError(
            "the closed-form partition asymptotic covers gamma = 0 only; "
            "for gamma != 0 use partition_exact / log_partition"
        )


def partition_asymptotic(
    n: int, alpha: float, beta: float, gamma: float = 0.0
) -> float:
    """Leading-order partition value:
    sqrt(e^(-alpha/2) * rho) / (2 sqrt(pi)) * rho^n * n^(-3/2)."""
    _check_gamma(gamma)
    if n < 1:
        raise ValueError("asymptotic form needs n >= 1")
    try:
        return math.exp(log_partition_asymptotic(n, alpha, beta))
    except OverflowError:
        return math.inf


def log_partition_asymptotic(n: int, alpha: float, beta: float) -> float:
    if n < 1:
        raise ValueError("asymptotic form needs n >= 1")
    r = rho(alpha, beta)
    prefactor = math.sqrt(math.exp(-alpha / 2.0) * r) / (2.0 * math.sqrt(math.pi))
    return math.log(prefactor) + n * math.log(r) - 1.5 * math.log(n)


def partition_ratio_to_asymptotic(
    n: int,
    alpha: float,
    beta: float,
    tables: SeriesTables | None = None,
) -> float:
    """exact partition / asymptotic partition, computed in the scaled
    domain so it stays finite for any n (gamma = 0)."""
    if n < 1:
        raise ValueError("need n >= 1")
    w = WeightTriple(math.exp(-alpha), math.exp(-beta), 1.0)
    tables = _tables_for(n, w, tables, exact=False)
    r = tables.scale
    prefactor = math.sqrt(math.exp(-alpha / 2.0) * r) / (2.0 * math.sqrt(math.pi))
    return float(tables.z[n]) / (prefactor * n**-1.5)
