"""Command-line front end.

Exit codes: 0 success, 1 validation problem (bad flags, malformed toll,
conflicting parameter groups, failed verify suite), 2 internal error.

Every output starts with a metadata block (version, full config, seed,
timestamp) so a run can be reproduced from its own output: a ``#``
comment line holding JSON in CSV mode, a ``meta`` object in JSON mode.
Weights are given either thermodynamically (--alpha/--beta/--gamma) or
directly as rationals (--weights A B C, e.g. 1/2 2/3 1); rational
weights switch exact arithmetic on where supported.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from datetime import datetime, timezone
from fractions import Fraction

from . import __version__
from .asymptotics import HypothesisViolated, predict_limit
from .counting import (
    catalan,
    count_by_internal,
    count_by_leaves,
    count_by_root,
    count_full,
    count_kr,
    count_mk,
)
from .enumeration import enumerate_trees
from .sampler import make_context, sample_batch, sample_batch_parallel
from .series import (
    build_tables,
    log_partition,
    log_partition_asymptotic,
    partition_ratio_to_asymptotic,
)
from .stats import bounded_root_experiment, ratio_experiment, scaling_experiment
from .weights import ThermoParams, WeightTriple, coerce_weights

DEFAULT_THREADS_VAR = "PLANETREES_THREADS"


class CliError(Exception):
    """Validation problem; message is printed as a single line."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1, not argparse's 2
        raise CliError(message)


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _meta(args: argparse.Namespace, **extra) -> dict:
    config = {}
    for key, value in sorted(vars(args).items()):
        if key in ("func", "output", "format") or value is None:
            continue
        config[key] = str(value) if isinstance(value, Fraction) else value
    meta = {
        "version": __version__,
        "timestamp": _timestamp(),
        "command": args.func.__name__.removeprefix("_cmd_"),
        "config": config,
    }
    meta.update(extra)
    return meta


def _emit(args, meta: dict, rows: list[dict], columns: list[str]) -> None:
    fmt = args.format
    path = args.output
    handle = sys.stdout if path in (None, "-") else open(path, "w", newline="")
    try:
        if fmt == "json":
            json.dump({"meta": meta, "rows": rows}, handle, indent=2, default=str)
            handle.write("\n")
        else:
            handle.write("# " + json.dumps(meta, default=str) + "\n")
            writer = csv.DictWriter(handle, fieldnames=columns)
            writer.writeheader()
            for row in rows:
                writer.writerow(row)
    finally:
        if handle is not sys.stdout:
            handle.close()


def _emit_json(args, payload: dict) -> None:
    path = args.output
    handle = sys.stdout if path in (None, "-") else open(path, "w")
    try:
        json.dump(payload, handle, indent=2, default=str)
        handle.write("\n")
    finally:
        if handle is not sys.stdout:
            handle.close()


# ---------------------------------------------------------------------------
# weight flags
# ---------------------------------------------------------------------------


def _add_weight_flags(p: _Parser) -> None:
    p.add_argument("--alpha", type=float, default=None, help="leaf energy")
    p.add_argument("--beta", type=float, default=None, help="internal-node energy")
    p.add_argument("--gamma", type=float, default=None, help="root-degree energy")
    p.add_argument(
        "--weights",
        nargs=3,
        metavar=("A", "B", "C"),
        default=None,
        help="direct rational weights (exact mode), e.g. --weights 1/2 2/3 1",
    )


def _gibbs_params(args):
    thermo = [args.alpha, args.beta, args.gamma]
    if args.weights is not None:
        if any(v is not None for v in thermo):
            raise CliError("--weights conflicts with --alpha/--beta/--gamma")
        try:
            a, b, c = (Fraction(s) for s in args.weights)
        except (ValueError, ZeroDivisionError) as exc:
            raise CliError(f"--weights expects rationals like 1/2: {exc}") from exc
        return WeightTriple(a, b, c)
    return ThermoParams(*(0.0 if v is None else v for v in thermo))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_enumerate(args) -> int:
    if args.n < 0:
        raise CliError("--n must be >= 0")
    rows = []
    truncated = False
    trees = (
        enumerate_trees(args.n)
        if args.guard is None
        else enumerate_trees(args.n, guard=args.guard)
    )
    for i, tree in enumerate(trees):
        if args.limit is not None and i >= args.limit:
            truncated = True
            break
        s = tree.stats()
        rows.append(
            {
                "index": i,
                "parens": tree.to_parens(),
                "leaves": s.leaves,
                "internal": s.internal,
                "root_degree": s.root_degree,
            }
        )
    meta = _meta(args, total=catalan(args.n), emitted=len(rows), truncated=truncated)
    _emit(args, meta, rows, ["index", "parens", "leaves", "internal", "root_degree"])
    return 0


def _count_rows(args) -> list[dict]:
    n = args.n
    explicit = {
        "leaves": args.leaves,
        "internal": args.internal,
        "root": args.root,
    }
    given = {k: v for k, v in explicit.items() if v is not None}
    if args.by and given:
        raise CliError("--by conflicts with --leaves/--internal/--root")
    if args.by == "leaves":
        return [
            {"leaves": k, "count": count_by_leaves(n, k)} for k in range(1, n + 1)
        ]
    if args.by == "internal":
        return [
            {"internal": m, "count": count_by_internal(n, m)} for m in range(0, n)
        ]
    if args.by == "root":
        return [{"root": r, "count": count_by_root(n, r)} for r in range(1, n + 1)]
    if args.by == "full":
        rows = []
        for m in range(0, n):
            for k in range(1, n + 1):
                for r in range(1, n + 1):
                    c = count_full(n, m, k, r)
                    if c:
                        rows.append(
                            {"internal": m, "leaves": k, "root": r, "count": c}
                        )
        return rows
    keys = frozenset(given)
    if keys == {"leaves", "internal", "root"}:
        c = count_full(n, given["internal"], given["leaves"], given["root"])
    elif keys == {"leaves", "internal"}:
        c = count_mk(n, given["internal"], given["leaves"])
    elif keys == {"leaves", "root"}:
        c = count_kr(n, given["leaves"], given["root"])
    elif keys == {"leaves"}:
        c = count_by_leaves(n, given["leaves"])
    elif keys == {"internal"}:
        c = count_by_internal(n, given["internal"])
    elif keys == {"root"}:
        c = count_by_root(n, given["root"])
    elif keys == {"internal", "root"}:
        c = sum(
            count_full(n, given["internal"], k, given["root"])
            for k in range(1, n + 1)
        )
    else:
        c = catalan(n)
    row = dict(given)
    row["count"] = c
    return [row]


def _cmd_count(args) -> int:
    if args.n < 1:
        raise CliError("--n must be >= 1")
    rows = _count_rows(args)
    columns = list(rows[0]) if rows else ["count"]
    _emit(args, _meta(args, total=catalan(args.n)), rows, columns)
    return 0


def _cmd_partition(args) -> int:
    if args.n < 0:
        raise CliError("--n must be >= 0")
    params = _gibbs_params(args)
    w = coerce_weights(params)
    tables = build_tables(w, args.n)
    logz = tables.log_partition(args.n)
    row = {
        "n": args.n,
        "a": float(w.a),
        "b": float(w.b),
        "c": float(w.c),
        "log_partition": logz,
        "partition": math.exp(logz) if logz < 700 else math.inf,
    }
    if w.is_exact and args.n <= 60:
        row["partition_exact"] = str(tables.partition(args.n))
    if args.asymptotic:
        if float(w.c) != 1.0:
            raise CliError(
                "--asymptotic needs gamma = 0 (root weight c = 1); "
                "drop --gamma or set c to 1"
            )
        alpha = -math.log(float(w.a))
        beta = -math.log(float(w.b))
        row["log_asymptotic"] = log_partition_asymptotic(args.n, alpha, beta)
        row["asymptotic_ratio"] = partition_ratio_to_asymptotic(
            args.n, alpha, beta, tables=tables
        )
    _emit(args, _meta(args), [row], list(row))
    return 0


def _resolve_threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get(DEFAULT_THREADS_VAR)
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise CliError(f"bad {DEFAULT_THREADS_VAR}={env!r}") from exc
    return 1


def _cmd_sample(args) -> int:
    if args.n < 0:
        raise CliError("--n must be >= 0")
    if args.count < 1:
        raise CliError("--count must be >= 1")
    params = _gibbs_params(args)
    threads = _resolve_threads(args)
    tolls = args.toll or []
    if threads > 1:
        batch = sample_batch_parallel(
            args.n,
            params,
            args.count,
            args.seed,
            threads,
            tolls=tolls,
            root_max=args.root_max,
            keep_trees=args.trees,
        )
    else:
        ctx = make_context(args.n, params, args.seed, root_max=args.root_max)
        batch = sample_batch(
            ctx, args.count, tolls=tolls, keep_trees=args.trees
        )
    columns = ["index", "edges", "leaves", "internal", "root_degree"]
    toll_names = list(batch.columns)
    columns += toll_names
    if args.trees:
        columns.append("parens")
    rows = []
    for i in range(batch.count):
        e, l0, l1, r = (int(v) for v in batch.stats[i])
        row = {
            "index": i,
            "edges": e,
            "leaves": l0,
            "internal": l1,
            "root_degree": r,
        }
        for name in toll_names:
            value = batch.columns[name][i]
            row[name] = int(value) if float(value).is_integer() else float(value)
        if args.trees:
            row["parens"] = batch.tree(i).to_parens()
        rows.append(row)
    _emit(args, _meta(args, **batch.meta(), threads=threads), rows, columns)
    return 0


def _cmd_predict(args) -> int:
    try:
        pred = predict_limit(args.toll, args.alpha, args.beta)
    except HypothesisViolated as exc:
        raise CliError(str(exc)) from exc
    payload = {
        "meta": _meta(args),
        "toll": pred.toll,
        "delta": None,
        "deltas": {},
        "vprime": str(pred.v_prime),
        "q": pred.q,
        "reference": pred.reference,
    }
    from .asymptotics import analyze_toll

    an = analyze_toll(args.toll)
    payload["delta"] = an.delta
    payload["deltas"] = {"n": an.delta_n, "d0": an.delta_d0, "d1": an.delta_d1}
    if args.format == "csv":
        row = {
            "toll": pred.toll,
            "alpha": args.alpha,
            "beta": args.beta,
            "delta": an.delta,
            "delta_n": an.delta_n,
            "delta_d0": an.delta_d0,
            "delta_d1": an.delta_d1,
            "vprime": str(pred.v_prime),
            "q": pred.q,
            "reference": pred.reference,
        }
        _emit(args, _meta(args), [row], list(row))
    else:
        _emit_json(args, payload)
    return 0


def _experiment_params(cfg: dict):
    if "weights" in cfg:
        return WeightTriple(*(Fraction(str(v)) for v in cfg["weights"]))
    return ThermoParams(
        float(cfg.get("alpha", 0.0)),
        float(cfg.get("beta", 0.0)),
        float(cfg.get("gamma", 0.0)),
    )


def _cmd_experiment(args) -> int:
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"config is not valid JSON: {exc}") from exc
    kind = cfg.get("kind")
    grid = cfg.get("n_grid")
    if not isinstance(grid, list) or not grid:
        raise CliError("config needs a non-empty n_grid list")
    count = int(cfg.get("count", 100_000))
    seed = int(cfg.get("seed", 0))
    if kind == "ratio":
        for key in ("prop_a", "prop_b"):
            if key not in cfg:
                raise CliError(f"ratio experiment config needs {key!r}")
        report = ratio_experiment(
            cfg["prop_a"],
            cfg["prop_b"],
            _experiment_params(cfg),
            grid,
            count=count,
            seed=seed,
            predicted=cfg.get("predicted"),
        )
    elif kind == "scaling":
        if "toll" not in cfg:
            raise CliError("scaling experiment config needs 'toll'")
        try:
            report = scaling_experiment(
                cfg["toll"],
                float(cfg.get("alpha", 0.0)),
                float(cfg.get("beta", 0.0)),
                grid,
                count=count,
                seed=seed,
            )
        except HypothesisViolated as exc:
            raise CliError(str(exc)) from exc
    elif kind == "bounded-root":
        if "toll" not in cfg or "h" not in cfg:
            raise CliError("bounded-root experiment config needs 'toll' and 'h'")
        report = bounded_root_experiment(
            cfg["toll"],
            _experiment_params(cfg),
            int(cfg["h"]),
            grid,
            count=count,
            seed=seed,
        )
    else:
        raise CliError(
            "config 'kind' must be one of ratio, scaling, bounded-root"
        )
    tolerance = cfg.get("tolerance")
    passed = None
    if tolerance is not None and report.predicted is not None:
        passed = bool(report.deviations[-1] <= float(tolerance) * abs(report.predicted))
    rows = []
    for i, n in enumerate(report.n_grid):
        rows.append(
            {
                "n": n,
                "numerator": report.numerator[i].value_float,
                "denominator": report.denominator[i].value_float,
                "ratio": report.observed[i],
                "std_error": report.std_errors[i],
                "deviation": (
                    report.deviations[i] if report.deviations is not None else ""
                ),
                "method": report.numerator[i].method,
            }
        )
    meta = _meta(args, kind=kind, summary=report.summary(), passed=passed)
    if args.format == "json":
        _emit_json(args, {"meta": meta, "rows": rows, "passed": passed})
    else:
        _emit(
            args,
            meta,
            rows,
            ["n", "numerator", "denominator", "ratio", "std_error", "deviation", "method"],
        )
    return 0


def _cmd_verify(args) -> int:
    from .acceptance import format_report, run_all, run_criterion

    if args.criterion is not None:
        results = [run_criterion(args.criterion, args.suite)]
    else:
        results = run_all(args.suite)
    for result in results:
        print(result.line(), file=sys.stderr)
    report = format_report(results, args.suite)
    report["meta"] = _meta(args)
    _emit_json(args, report)
    return 0 if report["all_passed"] else 1


# ---------------------------------------------------------------------------
# parser assembly
# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(
        prog="planetrees",
        description="Plane trees under leaf/internal/root Gibbs weights.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p: _Parser, default_format: str = "csv") -> None:
        p.add_argument("--output", "-o", default="-", help="file path or - for stdout")
        p.add_argument(
            "--format", choices=["csv", "json"], default=default_format
        )

    p = sub.add_parser("enumerate", help="list all trees with n edges")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--limit", type=int, default=None, help="cap emitted rows")
    p.add_argument(
        "--guard",
        type=int,
        default=None,
        help="raise the n ceiling for exhaustive enumeration (default 16)",
    )
    common(p)
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("count", help="closed-form tree counts by statistics")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--by", choices=["leaves", "internal", "root", "full"])
    p.add_argument("--leaves", type=int, default=None)
    p.add_argument("--internal", type=int, default=None)
    p.add_argument("--root", type=int, default=None)
    common(p)
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("partition", help="Gibbs partition value at size n")
    p.add_argument("--n", type=int, required=True)
    _add_weight_flags(p)
    p.add_argument(
        "--asymptotic",
        action="store_true",
        help="include the closed-form large-n estimate and the ratio to it",
    )
    common(p)
    p.set_defaults(func=_cmd_partition)

    p = sub.add_parser("sample", help="draw trees from the exact Gibbs law")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--root-max", type=int, default=None)
    p.add_argument(
        "--toll",
        action="append",
        help="toll to evaluate per tree (name or expression); repeatable",
    )
    p.add_argument("--trees", action="store_true", help="include parenthesis strings")
    p.add_argument(
        "--threads",
        type=int,
        default=None,
        help=f"worker threads (default ${DEFAULT_THREADS_VAR} or 1)",
    )
    _add_weight_flags(p)
    common(p)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("predict", help="scaling exponent and limit multiplier")
    p.add_argument("--toll", required=True)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    common(p, default_format="json")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser(
        "experiment", help="run a configured convergence experiment"
    )
    p.add_argument("--config", required=True, help="JSON config path")
    common(p)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("verify", help="run the acceptance battery")
    p.add_argument("--suite", choices=["quick", "full"], default="quick")
    p.add_argument(
        "--criterion", type=int, default=None, help="run a single criterion (1-9)"
    )
    common(p, default_format="json")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 0
    except Exception as exc:  # internal assertion: anything unexpected
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
