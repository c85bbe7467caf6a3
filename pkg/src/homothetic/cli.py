"""Command-line front end over JSON and CSV files.

Exit codes: 0 success, 2 schema or usage error, 3 domain-membership failure,
4 solver non-convergence (partial results are still written with
"certified": false). Diagnostics go to standard error as JSON lines.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import decompose as dec
from . import fisher, welfare
from .aggregate import aggregate_population, contour_sample
from .io import (
    SchemaError,
    dumps,
    fmt_float,
    market_from_dict,
    population_from_dict,
    population_to_dict,
    pref_from_dict,
    read_json,
)
from .prefcore import CES, DimensionError, DomainError, Preference, demand, expenditure_shares, preference_distance

EXIT_OK, EXIT_SCHEMA, EXIT_DOMAIN, EXIT_SOLVER = 0, 2, 3, 4


def _diag(level: str, message: str, **extra) -> None:
    rec = {"level": level, "message": message, **extra}
    sys.stderr.write(json.dumps(rec, sort_keys=True) + "\n")


def _load_pref(path: str) -> Preference:
    """A preference file, or a population file (replaced by its aggregate)."""
    d = read_json(path)
    if isinstance(d, dict) and "agents" in d:
        return aggregate_population(population_from_dict(d))
    if isinstance(d, dict) and "pref" in d:
        d = d["pref"]
    return pref_from_dict(d)


def _vector(text: str, name: str) -> np.ndarray:
    try:
        v = np.array([float(x) for x in text.split(",")])
    except ValueError as exc:
        raise SchemaError(f"--{name} must be comma-separated numbers") from exc
    return v


def _emit_json(path: str | None, obj) -> None:
    text = dumps(obj) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_csv(path: str | None, header: list[str], rows) -> None:
    buf = _io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for r in rows:
        wr.writerow([fmt_float(float(x)).strip('"') for x in r])
    if path is None or path == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())


def _parallel_rows(fn, P: np.ndarray, threads: int) -> np.ndarray:
    if threads <= 1 or len(P) < 2 * threads:
        return fn(P)
    parts = np.array_split(P, threads)
    with ThreadPoolExecutor(threads) as ex:
        return np.concatenate(list(ex.map(fn, parts)))


def _price_grid(args, n: int) -> np.ndarray:
    if not 1 <= args.good <= n:
        raise SchemaError(f"--good must be between 1 and {n}")
    if not (0 < args.pmin < args.pmax) or args.points < 2:
        raise SchemaError("need 0 < pmin < pmax and at least 2 points")
    base = np.ones(n) if args.base is None else _vector(args.base, "base")
    if base.shape != (n,) or np.any(base <= 0):
        raise SchemaError("--base must be a positive vector with one entry per good")
    P = np.tile(base, (args.points, 1))
    P[:, args.good - 1] = np.geomspace(args.pmin, args.pmax, args.points)
    return P


# --- commands -----------------------------------------------------------------------

def cmd_aggregate(args) -> int:
    pop = population_from_dict(read_json(args.inp))
    _emit_json(args.out, aggregate_population(pop).to_dict())
    return EXIT_OK


def cmd_demand_curve(args) -> int:
    pref = _load_pref(args.inp)
    P = _price_grid(args, pref.n)
    X = _parallel_rows(lambda Q: demand(pref, Q, args.budget), P, args.threads)
    spend = np.sum(P * X, axis=1)
    head = [f"p{i + 1}" for i in range(pref.n)] + [f"x{i + 1}" for i in range(pref.n)] + ["spend"]
    _emit_csv(args.out, head, np.column_stack([P, X, spend]))
    return EXIT_OK


def cmd_shares_curve(args) -> int:
    pref = _load_pref(args.inp)
    P = _price_grid(args, pref.n)
    S = _parallel_rows(lambda Q: expenditure_shares(pref, Q), P, args.threads)
    head = [f"p{i + 1}" for i in range(pref.n)] + [f"s{i + 1}" for i in range(pref.n)]
    _emit_csv(args.out, head, np.column_stack([P, S]))
    return EXIT_OK


def cmd_solve_fisher(args) -> int:
    pop, X, tol = market_from_dict(read_json(args.inp))
    if args.tol is not None:
        tol = args.tol
    res = fisher.solve_equilibrium(pop, X, tol=tol, max_iter=args.max_iter)
    _emit_json(args.out, {
        "prices": res.prices,
        "allocations": res.allocations,
        "gap": res.gap,
        "iterations": res.iterations,
        "certified": res.certified,
    })
    if not res.certified:
        _diag("error", "equilibrium solver did not reach the requested tolerance", gap=res.gap, tol=tol)
        return EXIT_SOLVER
    return EXIT_OK


def cmd_decompose(args) -> int:
    pref = _load_pref(args.inp)
    if args.into == "linear":
        mu = dec.mrs_distribution_from_substitutes(pref, grid=args.grid)
        _emit_json(args.out, mu.to_dict())
        return EXIT_OK
    if not isinstance(pref, CES) or pref.n != 2 or not pref.sigma < 1:
        raise DomainError("Leontief decomposition is available for two-good CES complements (sigma < 1)")
    nu = dec.ces_complements_leontief_density(pref.a[0], pref.a[1], pref.sigma)
    _emit_json(args.out, nu.to_dict())
    return EXIT_OK


def _change(args) -> welfare.PriceChange:
    return welfare.PriceChange(_vector(args.p0, "p0"), _vector(args.p1, "p1"))


def cmd_welfare(args) -> int:
    d = read_json(args.inp)
    change = _change(args)
    kinds = welfare.KINDS if args.kind == "all" else (args.kind,)
    out = {}
    if isinstance(d, dict) and "agents" in d:
        pop = population_from_dict(d)
        for k in kinds:
            out[k] = welfare.population_welfare(pop, k, change)
    else:
        pref = _load_pref(args.inp)
        for k in kinds:
            out[k] = welfare.welfare_measure(k, pref, args.budget, change)
    _emit_json(args.out, out)
    return EXIT_OK


def _range_dict(r: welfare.WelfareRange) -> dict:
    d = {"lower": r.lower, "upper": r.upper}
    if r.witnesses is not None:
        d["witnesses"] = [population_to_dict(w) for w in r.witnesses]
    return d


def cmd_welfare_range(args) -> int:
    change = _change(args)
    if args.domain == "cobb_douglas":
        if args.param is None:
            raise SchemaError("--param (aggregate share of good 1) is required for the cobb_douglas domain")
        fam = welfare.cobb_douglas_family()
        w = welfare.welfare_functional(args.kind, change)
        r = welfare.robust_range_parametric(fam, w, args.param, args.total, grid=args.grid)
        _emit_json(args.out, _range_dict(r))
        if args.csv:
            _emit_csv(args.csv, ["param", "w", "vex", "cav"], welfare.hull_table(fam, w))
        return EXIT_OK
    if args.kind != "EV":
        raise SchemaError("the substitutes domain supports --kind EV")
    if args.inp is None:
        raise SchemaError("--in is required for the substitutes domain")
    pref = _load_pref(args.inp)
    r = welfare.robust_range_substitutes_ev(pref, args.total, change)
    _emit_json(args.out, _range_dict(r))
    return EXIT_OK


def cmd_check_membership(args) -> int:
    pref = _load_pref(args.inp)
    report: dict = {"domain": args.domain}
    if args.domain == "substitutes":
        try:
            dec.check_substitutes(pref)
            report["member"] = True
        except DomainError as exc:
            report.update(member=False, reason=str(exc))
    else:
        p = np.ones(pref.n) if args.p is None else _vector(args.p, "p")
        if args.domain == "complements":
            checks = [dec.complete_monotonicity_check(pref, g, p, order=args.order) for g in range(pref.n)]
            report["member"] = all(c.passed for c in checks)
            report["checks"] = [
                {"good": g + 1, "order": c.order, "value": c.value, "error": c.error, "ok": c.sign_ok}
                for g, rep in enumerate(checks) for c in rep.checks
            ]
        else:
            rep = dec.arum_sign_conditions_check(pref, p, q_max=args.order)
            report["member"] = rep.passed
            report["checks"] = [
                {"good": c.good + 1, "wrt": [j + 1 for j in c.wrt], "value": c.value, "error": c.error, "ok": c.ok}
                for c in rep.checks
            ]
    _emit_json(args.out, report)
    if not report["member"]:
        _diag("error", f"preference fails the {args.domain} membership check")
        return EXIT_DOMAIN
    return EXIT_OK


def cmd_distance(args) -> int:
    a, b = _load_pref(args.inp), _load_pref(args.other)
    if a.n != b.n:
        raise DimensionError("preferences differ in the number of goods")
    _emit_json(args.out, {"distance": preference_distance(a, b, grid=args.grid)})
    return EXIT_OK


def cmd_contour(args) -> int:
    pref = _load_pref(args.inp)
    pts = contour_sample(pref, args.level, args.directions)
    n = pref.n
    rows = []
    for pt in pts:
        x = pt.x if pt.x is not None else np.full(n, math.inf)
        rows.append(list(pt.angles) + list(x))
    head = (["angle"] if n == 2 else ["ray_azimuth", "ray_polar"]) + [f"x{i + 1}" for i in range(n)]
    _emit_csv(args.out, head, rows)
    return EXIT_OK


def cmd_choice_mc(args) -> int:
    w = _vector(args.w, "w")
    est = dec.arum_choice_probabilities_mc(dec.ShockSpec(args.shock, args.scale), w, args.samples, args.seed)
    _emit_json(args.out, {"probs": est.probs, "stderr": est.stderr, "samples": est.samples, "ties": est.ties})
    return EXIT_OK


# --- parser ----------------------------------------------------------------------------

_CSV_HELP = {
    "demand-curve": "CSV columns: p1..pn, x1..xn, spend (= budget at every row)",
    "shares-curve": "CSV columns: p1..pn, s1..sn",
    "contour": "CSV columns: angle (n=2) or ray_azimuth, ray_polar (n=3), then x1..xn; inf for rays that never reach the level",
    "welfare-range": "optional CSV (--csv) columns: param, w, vex, cav",
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="homothetic", description=__doc__.splitlines()[0])
    ap.add_argument("--threads", type=int, default=1, help="threads for grid evaluations")
    sub = ap.add_subparsers(dest="command", required=True)

    def cmd(name, fn, help_, inp=True):
        p = sub.add_parser(name, help=help_, description=help_, epilog=_CSV_HELP.get(name))
        if inp:
            p.add_argument("--in", dest="inp", required=True, help="input JSON file")
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.set_defaults(func=fn)
        return p

    cmd("aggregate", cmd_aggregate, "aggregate a population into one preference")

    for name, fn, what in (("demand-curve", cmd_demand_curve, "demand"), ("shares-curve", cmd_shares_curve, "shares")):
        p = cmd(name, fn, f"{what} along a price sweep of one good (others fixed)")
        p.add_argument("--good", type=int, required=True, help="1-based index of the swept good")
        p.add_argument("--pmin", type=float, required=True)
        p.add_argument("--pmax", type=float, required=True)
        p.add_argument("--points", type=int, default=200)
        p.add_argument("--base", default=None, help="comma-separated base prices (default all ones)")
        p.add_argument("--budget", type=float, default=1.0)

    p = cmd("solve-fisher", cmd_solve_fisher, "Fisher-market equilibrium prices and allocations")
    p.add_argument("--tol", type=float, default=None, help="target epsilon gap (overrides the market file)")
    p.add_argument("--max-iter", type=int, default=200)

    p = cmd("decompose", cmd_decompose, "decompose a two-good preference into elementary consumers")
    p.add_argument("--into", choices=("linear", "leontief"), default="linear")
    p.add_argument("--grid", type=int, default=10_000)

    p = cmd("welfare", cmd_welfare, "EV / CV / AV of a preference or population")
    p.add_argument("--kind", choices=welfare.KINDS + ("all",), default="all")
    p.add_argument("--p0", required=True)
    p.add_argument("--p1", required=True)
    p.add_argument("--budget", type=float, default=1.0, help="budget when the input is a single preference")

    p = cmd("welfare-range", cmd_welfare_range, "robust welfare range compatible with an aggregate", inp=False)
    p.add_argument("--in", dest="inp", default=None, help="aggregate preference JSON (substitutes domain)")
    p.add_argument("--domain", choices=("cobb_douglas", "substitutes"), required=True)
    p.add_argument("--kind", choices=welfare.KINDS, default="EV")
    p.add_argument("--param", type=float, default=None, help="aggregate Cobb-Douglas share of good 1")
    p.add_argument("--total", type=float, default=1.0, help="total budget B")
    p.add_argument("--p0", required=True)
    p.add_argument("--p1", required=True)
    p.add_argument("--grid", type=int, default=10_001)
    p.add_argument("--csv", default=None, help="write w and its hulls over the parameter grid")

    p = cmd("check-membership", cmd_check_membership, "test membership in the substitutes, complements or ARUM domain")
    p.add_argument("--domain", choices=("substitutes", "complements", "arum"), required=True)
    p.add_argument("--p", default=None, help="comma-separated evaluation prices (default all ones)")
    p.add_argument("--order", type=int, default=None, help="maximal derivative order")

    p = cmd("distance", cmd_distance, "log-expenditure distance between two preferences")
    p.add_argument("--other", required=True, help="second preference JSON file")
    p.add_argument("--grid", type=int, default=2000)

    p = cmd("contour", cmd_contour, "sample the contour u(x) = level along rays")
    p.add_argument("--level", type=float, default=1.0)
    p.add_argument("--directions", type=int, default=64)

    p = cmd("choice-mc", cmd_choice_mc, "Monte Carlo choice probabilities of argmax (w_i + shock_i)", inp=False)
    p.add_argument("--w", required=True, help="comma-separated systematic utilities")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--shock", choices=("gumbel", "normal"), default="gumbel")
    p.add_argument("--scale", type=float, default=1.0)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_SCHEMA
    if args.threads < 1:
        _diag("error", "--threads must be positive")
        return EXIT_SCHEMA
    if getattr(args, "order", None) is None and args.command == "check-membership" and args.domain == "complements":
        args.order = 6
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            code = args.func(args)
        except SchemaError as exc:
            _diag("error", str(exc), kind="schema")
            code = EXIT_SCHEMA
        except DomainError as exc:
            _diag("error", str(exc), kind="domain")
            code = EXIT_DOMAIN
        except (DimensionError, ValueError, TypeError, KeyError) as exc:
            _diag("error", str(exc), kind="invalid_input")
            code = EXIT_SCHEMA
    for w in caught:
        _diag("warning", str(w.message), category=w.category.__name__)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
