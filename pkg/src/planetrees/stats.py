"""Moment estimation and convergence experiments.

One engine serves two regimes: small n goes through full enumeration
(exact, zero standard error), large n through the exact-law sampler
(Monte Carlo with standard errors).  Experiments compare means across a
grid of sizes against a predicted limit and report deviations plus a
monotonicity flag, nothing fancier: the theory guarantees the limit,
not a rate.

Ratio experiments at a single parameter setting reuse one batch for
numerator and denominator, so their standard error takes the sample
covariance into account.  Cross-parameter experiments use independent
batches with seeds derived from one root seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np
from scipy.stats import chi2

from .asymptotics import analyze_toll, q_constant
from .counting import catalan
from .enumeration import exact_moment_table
from .properties import NAMED_TOLLS, PolynomialToll, parse_toll
from .sampler import make_context, sample_batch
from .weights import ThermoParams, WeightTriple, coerce_weights

__all__ = [
    "EXACT_GUARD",
    "MomentEstimate",
    "RatioReport",
    "ChiSquareResult",
    "estimate_moment",
    "ratio_experiment",
    "scaling_experiment",
    "bounded_root_experiment",
    "total_variation",
    "chi_square_test",
]

EXACT_GUARD = 12  # full enumeration up to here, sampling beyond

MEAN_LIMIT_NOTE = (
    "limits are distributional; convergence of means is assumed on top "
    "(uniform integrability not separately verified)"
)


def _resolve_prop(prop) -> tuple[str, PolynomialToll]:
    if isinstance(prop, PolynomialToll):
        return prop.text, prop
    if isinstance(prop, tuple) and len(prop) == 2:
        return str(prop[0]), prop[1]
    if isinstance(prop, str):
        if prop in NAMED_TOLLS:
            return prop, NAMED_TOLLS[prop]
        return prop, parse_toll(prop)
    raise TypeError(f"cannot interpret {prop!r} as a property")


def _child_seed(root_seed: int, index: int) -> int:
    state = np.random.SeedSequence(root_seed, spawn_key=(index,)).generate_state(2)
    return int(state[0]) << 32 | int(state[1])


@dataclass(frozen=True)
class MomentEstimate:
    """One E[P^k] figure, exact or sampled.

    ``std_error`` is 0 exactly when ``method`` is "enumeration-exact";
    ``count`` is the number of trees enumerated or drawn.
    """

    prop: str
    n: int
    weights: WeightTriple
    root_max: int | None
    k: int
    value: float | Fraction
    std_error: float
    count: int
    method: str
    seed: int | None = None

    def __post_init__(self):
        if (self.std_error == 0.0) != (self.method == "enumeration-exact"):
            raise ValueError("std_error must be 0 iff enumeration-exact")

    @property
    def value_float(self) -> float:
        return float(self.value)


def _fsum_mean_var(x: np.ndarray) -> tuple[float, float]:
    """Compensated two-pass mean and variance (ddof=1)."""
    m = len(x)
    mean = math.fsum(x) / m
    var = math.fsum((xi - mean) ** 2 for xi in x) / (m - 1)
    return mean, var


def estimate_moment(
    n: int,
    params,
    prop,
    k: int = 1,
    count: int = 100_000,
    seed: int = 0,
    guard: int = EXACT_GUARD,
    root_max: int | None = None,
) -> MomentEstimate:
    """E[P^k] under the Gibbs law at size n.

    Below ``guard`` the answer comes from full enumeration and is exact
    (a Fraction for rational weights); above, from ``count`` sampler
    draws with a standard error.
    """
    name, toll = _resolve_prop(prop)
    w = coerce_weights(params)
    if k < 1:
        raise ValueError("k must be >= 1")
    if n <= guard:
        moments, _ = exact_moment_table(
            n, [w], [toll], k_max=k, root_max=root_max, guard=max(n, guard)
        )
        return MomentEstimate(
            prop=name,
            n=n,
            weights=w,
            root_max=root_max,
            k=k,
            value=moments[0][0][k - 1],
            std_error=0.0,
            count=catalan(n),
            method="enumeration-exact",
        )
    if count < 2:
        raise ValueError("Monte Carlo needs count >= 2")
    ctx = make_context(n, w, seed, root_max=root_max)
    batch = sample_batch(ctx, count, tolls=[(name, toll)])
    x = batch.columns[name]
    if k > 1:
        x = x**k
    mean, var = _fsum_mean_var(x)
    return MomentEstimate(
        prop=name,
        n=n,
        weights=w,
        root_max=root_max,
        k=k,
        value=mean,
        std_error=math.sqrt(var / count),
        count=count,
        method="monte-carlo",
        seed=seed,
    )


@dataclass(frozen=True)
class RatioReport:
    """Observed mean ratios across a size grid, against a predicted limit.

    ``deviations`` is |observed - predicted| per grid point when a
    prediction exists; ``monotone_decreasing`` says whether that
    sequence decreases along the grid (a trend statement, not a fit).
    """

    kind: str
    n_grid: tuple[int, ...]
    numerator: tuple[MomentEstimate, ...]
    denominator: tuple[MomentEstimate, ...]
    observed: tuple[float, ...]
    std_errors: tuple[float, ...]
    predicted: float | None
    deviations: tuple[float, ...] | None
    monotone_decreasing: bool | None
    assumptions: tuple[str, ...] = ()

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "n_grid": list(self.n_grid),
            "observed": list(self.observed),
            "std_errors": list(self.std_errors),
            "predicted": self.predicted,
            "deviations": None if self.deviations is None else list(self.deviations),
            "monotone_decreasing": self.monotone_decreasing,
            "assumptions": list(self.assumptions),
        }


def _grid_ok(n_grid) -> tuple[int, ...]:
    grid = tuple(int(n) for n in n_grid)
    if not grid:
        raise ValueError("n_grid must be non-empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("n_grid must be strictly increasing")
    return grid


def _finish_report(kind, grid, nums, dens, observed, errs, predicted, assumptions):
    deviations = monotone = None
    if predicted is not None:
        deviations = tuple(abs(o - predicted) for o in observed)
        monotone = all(b <= a for a, b in zip(deviations, deviations[1:]))
    return RatioReport(
        kind=kind,
        n_grid=grid,
        numerator=tuple(nums),
        denominator=tuple(dens),
        observed=tuple(observed),
        std_errors=tuple(errs),
        predicted=predicted,
        deviations=deviations,
        monotone_decreasing=monotone,
        assumptions=assumptions,
    )


def ratio_experiment(
    prop_a,
    prop_b,
    params,
    n_grid,
    count: int = 100_000,
    seed: int = 0,
    predicted: float | None = None,
    guard: int = EXACT_GUARD,
) -> RatioReport:
    """E[P_a]/E[P_b] under one Gibbs law across a size grid.

    Monte Carlo points evaluate both properties on the same trees, so
    the ratio's standard error includes their covariance.
    """
    name_a, toll_a = _resolve_prop(prop_a)
    name_b, toll_b = _resolve_prop(prop_b)
    w = coerce_weights(params)
    grid = _grid_ok(n_grid)
    nums, dens, observed, errs = [], [], [], []
    for i, n in enumerate(grid):
        if n <= guard:
            moments, _ = exact_moment_table(
                n, [w], [toll_a, toll_b], k_max=1, guard=max(n, guard)
            )
            ma, mb = moments[0][0][0], moments[0][1][0]
            for name, val in ((name_a, ma), (name_b, mb)):
                est = MomentEstimate(
                    prop=name, n=n, weights=w, root_max=None, k=1,
                    value=val, std_error=0.0, count=catalan(n),
                    method="enumeration-exact",
                )
                (nums if name is name_a else dens).append(est)
            observed.append(float(ma) / float(mb))
            errs.append(0.0)
            continue
        child = _child_seed(seed, i)
        ctx = make_context(n, w, child)
        batch = sample_batch(ctx, count, tolls=[(name_a, toll_a), (name_b, toll_b)])
        xa, xb = batch.columns[name_a], batch.columns[name_b]
        ma, va = _fsum_mean_var(xa)
        mb, vb = _fsum_mean_var(xb)
        cov = math.fsum(
            (p - ma) * (q - mb) for p, q in zip(xa, xb)
        ) / (count - 1)
        nums.append(
            MomentEstimate(
                prop=name_a, n=n, weights=w, root_max=None, k=1, value=ma,
                std_error=math.sqrt(va / count), count=count,
                method="monte-carlo", seed=child,
            )
        )
        dens.append(
            MomentEstimate(
                prop=name_b, n=n, weights=w, root_max=None, k=1, value=mb,
                std_error=math.sqrt(vb / count), count=count,
                method="monte-carlo", seed=child,
            )
        )
        observed.append(ma / mb)
        # delta method for a ratio of means over the same sample
        rvar = (va / mb**2 + ma**2 * vb / mb**4 - 2 * ma * cov / mb**3) / count
        errs.append(math.sqrt(max(rvar, 0.0)))
    return _finish_report("ratio", grid, nums, dens, observed, errs, predicted, ())


def _pair_means(
    n, w_num, w_den, name, toll, k, count, seed, i, root_num, guard
):
    """One grid point of a cross-parameter experiment: independent
    numerator and denominator estimates (exact when n is small)."""
    if n <= guard:
        if root_num is None:
            moments, _ = exact_moment_table(
                n, [w_num, w_den], [toll], k_max=k, guard=max(n, guard)
            )
            ma, mb = moments[0][0][k - 1], moments[1][0][k - 1]
        else:
            mom_n, _ = exact_moment_table(
                n, [w_num], [toll], k_max=k, root_max=root_num, guard=max(n, guard)
            )
            mom_d, _ = exact_moment_table(
                n, [w_den], [toll], k_max=k, guard=max(n, guard)
            )
            ma, mb = mom_n[0][0][k - 1], mom_d[0][0][k - 1]
        ea = MomentEstimate(
            prop=name, n=n, weights=w_num, root_max=root_num, k=k, value=ma,
            std_error=0.0, count=catalan(n), method="enumeration-exact",
        )
        eb = MomentEstimate(
            prop=name, n=n, weights=w_den, root_max=None, k=k, value=mb,
            std_error=0.0, count=catalan(n), method="enumeration-exact",
        )
        return ea, eb, float(ma) / float(mb), 0.0
    ests = []
    for j, (w, rmax) in enumerate(((w_num, root_num), (w_den, None))):
        child = _child_seed(seed, 2 * i + j)
        ctx = make_context(n, w, child, root_max=rmax)
        batch = sample_batch(ctx, count, tolls=[(name, toll)])
        x = batch.columns[name]
        if k > 1:
            x = x**k
        mean, var = _fsum_mean_var(x)
        ests.append(
            MomentEstimate(
                prop=name, n=n, weights=w, root_max=rmax, k=k, value=mean,
                std_error=math.sqrt(var / count), count=count,
                method="monte-carlo", seed=child,
            )
        )
    ea, eb = ests
    ma, mb = ea.value, eb.value
    rvar = ea.std_error**2 / mb**2 + ma**2 * eb.std_error**2 / mb**4
    return ea, eb, ma / mb, math.sqrt(rvar)


def scaling_experiment(
    f,
    alpha: float,
    beta: float,
    n_grid,
    count: int = 100_000,
    seed: int = 0,
    k: int = 1,
    guard: int = EXACT_GUARD,
) -> RatioReport:
    """E_(alpha,beta,0)[P^f] / E_(0,0,0)[P^f] across sizes, against the
    predicted multiplier from the toll's degree analysis."""
    name, toll = _resolve_prop(f)
    predicted = q_constant(toll, alpha, beta) ** k
    grid = _grid_ok(n_grid)
    w_num = coerce_weights(ThermoParams(alpha, beta, 0.0))
    w_den = WeightTriple(1.0, 1.0, 1.0)
    nums, dens, observed, errs = [], [], [], []
    for i, n in enumerate(grid):
        ea, eb, obs, err = _pair_means(
            n, w_num, w_den, name, toll, k, count, seed, i, None, guard
        )
        nums.append(ea)
        dens.append(eb)
        observed.append(obs)
        errs.append(err)
    return _finish_report(
        "scaling", grid, nums, dens, observed, errs, predicted, (MEAN_LIMIT_NOTE,)
    )


def bounded_root_experiment(
    f,
    params,
    h: int,
    n_grid,
    count: int = 100_000,
    seed: int = 0,
    guard: int = EXACT_GUARD,
) -> RatioReport:
    """Mean under (alpha, beta, gamma) with root degree capped at h,
    against the unrestricted (alpha, beta, 0) mean; the root constraint
    and root weight wash out of the limit, so the prediction is 1."""
    if h < 1:
        raise ValueError("root bound h must be >= 1")
    name, toll = _resolve_prop(f)
    w = coerce_weights(params)
    w_den = WeightTriple(w.a, w.b, type(w.c)(1) if isinstance(w.c, Rational) else 1.0)
    grid = _grid_ok(n_grid)
    nums, dens, observed, errs = [], [], [], []
    for i, n in enumerate(grid):
        ea, eb, obs, err = _pair_means(
            n, w, w_den, name, toll, 1, count, seed, i, h, guard
        )
        nums.append(ea)
        dens.append(eb)
        observed.append(obs)
        errs.append(err)
    return _finish_report(
        "bounded-root", grid, nums, dens, observed, errs, 1.0, (MEAN_LIMIT_NOTE,)
    )


# ---------------------------------------------------------------------------
# distribution-level comparisons
# ---------------------------------------------------------------------------


def total_variation(observed_counts: dict, expected_probs: dict, total: int) -> float:
    """TV distance between empirical frequencies and exact probabilities.

    Keys present on only one side contribute their full mass.
    """
    if total <= 0:
        raise ValueError("total must be positive")
    keys = set(observed_counts) | set(expected_probs)
    acc = 0.0
    for key in keys:
        emp = observed_counts.get(key, 0) / total
        acc += abs(emp - float(expected_probs.get(key, 0.0)))
    return 0.5 * acc


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    dof: int
    p_value: float
    pooled_bins: int


def chi_square_test(
    observed_counts: dict,
    expected_probs: dict,
    total: int,
    min_expected: float = 5.0,
) -> ChiSquareResult:
    """Goodness-of-fit test of empirical counts against exact category
    probabilities.  Categories whose expected count falls below
    ``min_expected`` are pooled into one bin first."""
    if total <= 0:
        raise ValueError("total must be positive")
    main_obs, main_exp = [], []
    pool_obs = pool_exp = 0.0
    pooled = 0
    for key, p in expected_probs.items():
        expect = float(p) * total
        obs = observed_counts.get(key, 0)
        if expect < min_expected:
            pool_obs += obs
            pool_exp += expect
            pooled += 1
        else:
            main_obs.append(obs)
            main_exp.append(expect)
    stray = set(observed_counts) - set(expected_probs)
    if stray:
        raise ValueError(f"observed categories outside the support: {sorted(stray)!r}")
    if pooled:
        main_obs.append(pool_obs)
        main_exp.append(pool_exp)
    if len(main_obs) < 2:
        raise ValueError("need at least two bins after pooling")
    stat = math.fsum(
        (o - e) ** 2 / e for o, e in zip(main_obs, main_exp) if e > 0
    )
    dof = len(main_obs) - 1
    return ChiSquareResult(
        statistic=stat, dof=dof, p_value=float(chi2.sf(stat, dof)), pooled_bins=pooled
    )
