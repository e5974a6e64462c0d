"""Acceptance battery: the nine release gates, runnable at two scales.

"full" runs every check at its contract size and tolerance; "quick" is
a scaled-down confidence pass (smaller sizes and draw counts, same
logic) meant to finish in well under a minute.  Each criterion returns
a :class:`CriterionResult` whose ``details`` carry the measured
numbers, so failures are diagnosable from the report alone.

All randomness is seeded per criterion; reruns are bit-identical.
"""

from __future__ import annotations

import math
import time
from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .asymptotics import analyze_toll, q_constant, q_k
from .counting import (
    catalan,
    count_by_internal,
    count_by_leaves,
    count_by_root,
    count_full,
    count_kr,
    count_mk,
    leaves_with_left_sibling,
    leftmost_path_length,
    psi,
)
from .enumeration import (
    _subtree_profiles,
    enumerate_trees,
    exact_distribution,
    iter_parens,
)
from .properties import (
    eval_polynomial_toll,
    parse_toll,
    path_length,
    wiener_index,
)
from .sampler import (
    make_context,
    sample_batch,
    shape_code_of_parens,
)
from .series import (
    build_tables,
    gn_explicit,
    gstar_identity_residual,
    partition_ratio_to_asymptotic,
    primary_recurrence_residual,
)
from .stats import (
    bounded_root_experiment,
    chi_square_test,
    estimate_moment,
    ratio_experiment,
    scaling_experiment,
    total_variation,
)
from .trees import PlaneTree, join, unjoin
from .weights import ThermoParams, WeightTriple

__all__ = ["CriterionResult", "CRITERIA", "run_criterion", "run_all", "format_report"]


@dataclass
class CriterionResult:
    index: int
    name: str
    passed: bool
    elapsed: float
    details: dict

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] criterion {self.index}: {self.name} ({self.elapsed:.1f}s)"


# ---------------------------------------------------------------------------
# 1: closed-form counts vs exhaustive histograms
# ---------------------------------------------------------------------------


def _crit_counting(level: str) -> tuple[bool, dict]:
    n_max = 10 if level == "full" else 8
    compared = 0
    mismatches: list = []
    for n in range(1, n_max + 1):
        hist: Counter = Counter()
        for text in iter_parens(n):
            _, (_, k, m, r) = _subtree_profiles(text)
            hist[(m, k, r)] += 1
        by_k: Counter = Counter()
        by_m: Counter = Counter()
        by_r: Counter = Counter()
        by_mk: Counter = Counter()
        by_kr: Counter = Counter()
        for (m, k, r), c in hist.items():
            by_k[k] += c
            by_m[m] += c
            by_r[r] += c
            by_mk[(m, k)] += c
            by_kr[(k, r)] += c
        for m in range(0, n + 1):
            for k in range(0, n + 1):
                for r in range(1, n + 1):
                    got = count_full(n, m, k, r)
                    want = hist.get((m, k, r), 0)
                    compared += 1
                    if got != want:
                        mismatches.append(("full", n, m, k, r, got, want))
        for k in range(1, n + 1):
            compared += 1
            if count_by_leaves(n, k) != by_k.get(k, 0):
                mismatches.append(("leaves", n, k))
        for m in range(0, n):
            compared += 1
            if count_by_internal(n, m) != by_m.get(m, 0):
                mismatches.append(("internal", n, m))
        for r in range(1, n + 1):
            compared += 1
            if count_by_root(n, r) != by_r.get(r, 0):
                mismatches.append(("root", n, r))
        for m in range(0, n + 1):
            for k in range(0, n + 1):
                compared += 1
                if count_mk(n, m, k) != by_mk.get((m, k), 0):
                    mismatches.append(("mk", n, m, k))
        for k in range(0, n + 1):
            for r in range(1, n + 1):
                compared += 1
                if count_kr(n, k, r) != by_kr.get((k, r), 0):
                    mismatches.append(("kr", n, k, r))
        if sum(hist.values()) != catalan(n):
            mismatches.append(("catalan", n))
    return not mismatches, {
        "n_max": n_max,
        "comparisons": compared,
        "mismatches": mismatches[:10],
    }


# ---------------------------------------------------------------------------
# 2: series recurrences and the explicit coefficient formula
# ---------------------------------------------------------------------------


def _crit_series(level: str) -> tuple[bool, dict]:
    order = 200 if level == "full" else 80
    w = WeightTriple(Fraction(1, 2), Fraction(2, 3), Fraction(3, 4))
    tab = build_tables(w, order)
    res_primary = primary_recurrence_residual(tab)
    res_gstar = gstar_identity_residual(tab)
    pairs = [(0.5, 0.5), (math.exp(-0.5), math.exp(-1.0)), (1.7, 0.3)]
    worst_rel = 0.0
    for a, b in pairs:
        ft = build_tables(WeightTriple(a, b, 1.0), 16, exact=False)
        for n in range(2, 17):
            ref = ft.g_coefficient(n)
            rel = abs(gn_explicit(n, a, b) - ref) / abs(ref)
            worst_rel = max(worst_rel, rel)
    passed = res_primary == 0 and res_gstar == 0 and worst_rel < 1e-10
    return passed, {
        "order": order,
        "primary_residual": str(res_primary),
        "gstar_residual": str(res_gstar),
        "explicit_formula_worst_rel": worst_rel,
    }


# ---------------------------------------------------------------------------
# 3: partition asymptotics ratio
# ---------------------------------------------------------------------------


def _crit_partition(level: str) -> tuple[bool, dict]:
    n_hi, n_lo = (2000, 500) if level == "full" else (1000, 250)
    alpha, beta = 0.5, 1.0
    r_hi = partition_ratio_to_asymptotic(n_hi, alpha, beta)
    r_lo = partition_ratio_to_asymptotic(n_lo, alpha, beta)
    passed = 0.98 <= r_hi <= 1.02 and abs(r_hi - 1.0) < abs(r_lo - 1.0)
    return passed, {
        "alpha": alpha,
        "beta": beta,
        f"ratio_n{n_hi}": r_hi,
        f"ratio_n{n_lo}": r_lo,
    }


# ---------------------------------------------------------------------------
# 4: sampler matches the enumeration-exact law tree by tree
# ---------------------------------------------------------------------------


def _crit_sampler(level: str) -> tuple[bool, dict]:
    draws = 1_000_000 if level == "full" else 100_000
    n = 6
    cases = [
        ("alpha-beta", ThermoParams(0.5, 1.0, 0.0), None),
        ("gamma-nonzero", ThermoParams(0.5, 1.0, 0.7), None),
        ("bounded-root-h2", ThermoParams(0.3, 0.6, 0.4), 2),
    ]
    passed = True
    details: dict = {"n": n, "draws": draws}
    for i, (tag, params, h) in enumerate(cases):
        ctx = make_context(n, params, seed=410 + i, root_max=h)
        batch = sample_batch(ctx, draws, want_shapes=True)
        dist = exact_distribution(n, params, root_max=h)
        probs = {
            shape_code_of_parens(text): p
            for text, p in dist.probabilities().items()
        }
        vals, cnts = np.unique(batch.shape_codes, return_counts=True)
        obs = {int(v): int(c) for v, c in zip(vals, cnts)}
        tv = total_variation(obs, probs, draws)
        chi = chi_square_test(obs, probs, draws)
        ok = tv < 0.01 and chi.p_value > 1e-3
        passed &= ok
        details[tag] = {
            "root_max": h,
            "support": len(probs),
            "tv": tv,
            "chi2": chi.statistic,
            "dof": chi.dof,
            "p_value": chi.p_value,
            "ok": ok,
        }
    return passed, details


# ---------------------------------------------------------------------------
# 5: depth-sum ratios under uniform weights
# ---------------------------------------------------------------------------


def _crit_depth_ratios(level: str) -> tuple[bool, dict]:
    if level == "full":
        grid, count = [8, 10, 12, 400, 1600], 100_000
    else:
        grid, count = [6, 8, 10, 400], 20_000
    details: dict = {"grid": grid, "count": count}
    passed = True
    for tag, prop, limit in (
        ("leaf", "leaf-depth", 2.0),
        ("internal", "internal-depth", 4.0),
    ):
        rep = ratio_experiment(
            "path-length", prop, (1, 1, 1), grid, count=count,
            seed=500, predicted=limit,
        )
        exact_devs = rep.deviations[:3]
        trend_ok = all(b < a for a, b in zip(exact_devs, exact_devs[1:]))
        final_ok = rep.deviations[-1] <= 0.05 * limit
        passed &= trend_ok and final_ok
        details[tag] = {
            "observed": list(rep.observed),
            "deviations": list(rep.deviations),
            "limit": limit,
            "exact_trend_decreasing": trend_ok,
            "final_within_5pct": final_ok,
        }
    return passed, details


# ---------------------------------------------------------------------------
# 6: scaling constant for the depth-sum toll
# ---------------------------------------------------------------------------


def _crit_scaling_constant(level: str) -> tuple[bool, dict]:
    alpha, beta = 0.5, 1.0
    q = q_constant("t+1", alpha, beta)
    exact = scaling_experiment("t+1", alpha, beta, [6, 12], seed=600)
    trend_ok = exact.deviations[1] < exact.deviations[0]
    if level == "full":
        n_mc, count = 2000, 100_000
    else:
        n_mc, count = 500, 20_000
    mc = scaling_experiment("t+1", alpha, beta, [n_mc], count=count, seed=601)
    rel = abs(mc.observed[0] - q) / q
    passed = trend_ok and rel <= 0.05
    return passed, {
        "q": q,
        "exact_ratios": list(exact.observed),
        "exact_deviations": list(exact.deviations),
        "trend_ok": trend_ok,
        "n_mc": n_mc,
        "mc_ratio": mc.observed[0],
        "mc_std_error": mc.std_errors[0],
        "rel_deviation": rel,
    }


# ---------------------------------------------------------------------------
# 7: Wiener-index scaling
# ---------------------------------------------------------------------------


def _crit_wiener_scaling(level: str) -> tuple[bool, dict]:
    alpha, beta = 0.5, 1.0
    toll = "(t+1)*(n-t)"
    q = q_constant(toll, alpha, beta)
    if level == "full":
        n_mc, count = 2000, 100_000
    else:
        n_mc, count = 500, 20_000
    rep = scaling_experiment(toll, alpha, beta, [n_mc], count=count, seed=700)
    rel = abs(rep.observed[0] - q) / q
    vp = analyze_toll(toll).v_prime  # 5/2: normalization for reporting
    norm = float(n_mc) ** float(vp)
    passed = rel <= 0.07
    return passed, {
        "q": q,
        "v_prime": str(vp),
        "n_mc": n_mc,
        "mc_ratio": rep.observed[0],
        "mc_std_error": rep.std_errors[0],
        "rel_deviation": rel,
        "normalized_means": {
            "weighted": rep.numerator[0].value_float / norm,
            "uniform": rep.denominator[0].value_float / norm,
        },
    }


# ---------------------------------------------------------------------------
# 8: root-weighted, root-bounded sampling has the same mean scale
# ---------------------------------------------------------------------------


def _crit_bounded_root(level: str) -> tuple[bool, dict]:
    params = ThermoParams(0.5, 1.0, 0.7)
    if level == "full":
        n_mc, count = 1000, 100_000
    else:
        n_mc, count = 400, 20_000
    rep = bounded_root_experiment(
        "path-length", params, 3, [n_mc], count=count, seed=800
    )
    dev = abs(rep.observed[0] - 1.0)
    passed = dev <= 0.05
    return passed, {
        "params": (params.alpha, params.beta, params.gamma),
        "h": 3,
        "n_mc": n_mc,
        "ratio": rep.observed[0],
        "std_error": rep.std_errors[0],
        "deviation": dev,
    }


# ---------------------------------------------------------------------------
# 9: structural identities at exhaustive scale
# ---------------------------------------------------------------------------


def _wiener_bfs(tree: PlaneTree) -> int:
    n = tree.n_vertices
    adj: list[list[int]] = [[] for _ in range(n)]
    par = tree.parent
    for v in range(1, n):
        adj[par[v]].append(v)
        adj[v].append(par[v])
    total = 0
    for s in range(n):
        dist = [-1] * n
        dist[s] = 0
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for w in adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    dq.append(w)
        total += sum(dist)
    return total // 2


def _crit_identities(level: str) -> tuple[bool, dict]:
    n_join = 4 if level == "quick" else 5
    n_psi = 7 if level == "quick" else 8
    n_wiener = 6 if level == "quick" else 7
    checks: dict[str, bool] = {}

    small = {n: list(enumerate_trees(n)) for n in range(0, n_join + 1)}
    ok = True
    for n1, ts1 in small.items():
        for n2, ts2 in small.items():
            for t1 in ts1:
                for t2 in ts2:
                    j = join(t1, t2)
                    u1, u2 = unjoin(j)
                    ok &= u1 == t1 and u2 == t2 and j.n_edges == n1 + n2 + 1
    checks["join_unjoin_roundtrip"] = ok

    ok = True
    for n in range(1, n_join + 2):
        for t in enumerate_trees(n):
            a, b = unjoin(t)
            ok &= join(a, b) == t
    checks["unjoin_join_roundtrip"] = ok

    ok = True
    for n in range(0, n_psi + 1):
        seen = set()
        for text in iter_parens(n):
            t = PlaneTree.from_parens(text)
            ti = psi(t)
            ok &= psi(ti) == t
            seen.add(ti.to_parens())
            s = t.stats()
            ok &= leftmost_path_length(ti) == s.root_degree
            ok &= leaves_with_left_sibling(ti) == s.internal
            ok &= ti.stats().leaves == (n + 1 - s.leaves if n >= 1 else 0)
        ok &= len(seen) == catalan(n)
    checks["psi_involution_and_translation"] = ok

    ok = True
    for n in range(0, n_psi + 1):
        texts = list(iter_parens(n))
        ok &= len(set(texts)) == catalan(n)
        for text in texts:
            ok &= PlaneTree.from_parens(text).to_parens() == text
    checks["parens_roundtrip"] = ok

    ok = True
    wiener_toll = parse_toll("(t+1)*(n-t)")
    for n in range(1, n_wiener + 1):
        for t in enumerate_trees(n):
            ref = _wiener_bfs(t)
            ok &= wiener_index(t) == ref
            ok &= eval_polynomial_toll(wiener_toll, t) == ref
    checks["wiener_vs_bfs_oracle"] = ok

    c1 = make_context(25, (0.6, 0.9, 1.3), seed=900)
    c2 = make_context(25, (0.6, 0.9, 1.3), seed=900)
    b1 = sample_batch(c1, 500, tolls=["path-length"])
    b2 = sample_batch(c2, 500, tolls=["path-length"], chunk_size=13)
    checks["sampler_deterministic"] = bool(
        np.array_equal(b1.stats, b2.stats)
        and np.array_equal(b1.columns["path-length"], b2.columns["path-length"])
    )

    ses = []
    for j, cnt in enumerate((10_000, 40_000, 160_000)):
        est = estimate_moment(
            50, (0.8, 1.1, 1.0), "path-length", count=cnt, seed=910 + j
        )
        ses.append(est.std_error)
    halves_ok = all(
        abs(ses[i] / ses[i + 1] - 2.0) <= 0.4 for i in range(len(ses) - 1)
    )
    checks["std_error_scaling"] = halves_ok

    ok = True
    for k in (1, 2, 3):
        lhs = (q_k("1", k, 0, 0) / q_k("l1", k, 0, 0)) * (
            q_k("l1", k, 0.4, 0.8) / q_k("1", k, 0.4, 0.8)
        )
        ok &= abs(lhs ** (1 / k) - q_constant("l1", 0.4, 0.8)) < 1e-10
    checks["qk_root_consistency"] = ok

    ok = True
    for n in range(0, 9):
        total = sum(1 for _ in iter_parens(n))
        ok &= total == catalan(n)
    checks["enumeration_catalan"] = ok

    ok = True
    for t in enumerate_trees(6):
        ok &= path_length(t) == eval_polynomial_toll(parse_toll("t+1"), t)
    checks["path_length_toll"] = ok

    return all(checks.values()), {"bounds": {"join": n_join, "psi": n_psi, "wiener": n_wiener}, **checks}


CRITERIA = [
    ("counting-closed-forms", _crit_counting),
    ("series-recurrences", _crit_series),
    ("partition-asymptotics", _crit_partition),
    ("sampler-exactness", _crit_sampler),
    ("depth-sum-ratios", _crit_depth_ratios),
    ("scaling-constant", _crit_scaling_constant),
    ("wiener-scaling", _crit_wiener_scaling),
    ("bounded-root-equivalence", _crit_bounded_root),
    ("structural-identities", _crit_identities),
]


def run_criterion(index: int, level: str = "full") -> CriterionResult:
    """Run one criterion (1-based index) at the given scale."""
    if level not in ("quick", "full"):
        raise ValueError("level must be 'quick' or 'full'")
    if not 1 <= index <= len(CRITERIA):
        raise ValueError(f"criterion index must be in 1..{len(CRITERIA)}")
    name, fn = CRITERIA[index - 1]
    start = time.perf_counter()
    passed, details = fn(level)
    return CriterionResult(
        index=index,
        name=name,
        passed=passed,
        elapsed=time.perf_counter() - start,
        details=details,
    )


def run_all(level: str = "full") -> list[CriterionResult]:
    return [run_criterion(i, level) for i in range(1, len(CRITERIA) + 1)]


def format_report(results: list[CriterionResult], level: str) -> dict:
    return {
        "suite": level,
        "all_passed": all(r.passed for r in results),
        "results": [
            {
                "index": r.index,
                "name": r.name,
                "passed": r.passed,
                "elapsed_s": round(r.elapsed, 3),
                "details": r.details,
            }
            for r in results
        ],
    }
