"""Command-line interface: ``kendep index|test|calibrate|simulate|kplot|reproduce``.

Every command writes one JSON document (to ``--json PATH``, or to standard
output when ``--json`` is absent).  Without ``--input`` the bundled
biomarker data set is analysed.  Exit status is 0 on success, 1 on an input,
configuration or I/O error and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .cache import CalibrationCache
from .dataio import biomarker_path, ingest_csv, parse_columns, write_sample_csv
from .diagnostics import DEFAULT_GRID_SIZE, classify_class_membership, kendall_curves, write_curves_csv
from .distributions import (
    ARCHIMEDEAN_FAMILIES,
    BIVARIATE_FAMILIES,
    CopulaSpec,
    EquicorrelatedSpec,
    sample_archimedean,
    sample_bivariate_family,
    sample_equicorrelated_normal,
    sample_fgm,
    sample_independent_uniform,
)
from .errors import ConfigurationError, DomainError, KendepError
from .independence import TestPolicy, calibrate_percentiles, estimate_sigma_pi, resolve_sigma, run_independence_test
from .report import analyze, document, dump_document
from .reproduce import TABLE_IDS, reproduce_table
from .standardize import calibrate_phi

__all__ = ["main", "build_parser"]

log = logging.getLogger("kendep")

SIMULATE_FAMILIES = ("uniform", "equicorrelated", *ARCHIMEDEAN_FAMILIES, "fgm", *BIVARIATE_FAMILIES)


# -- helpers -------------------------------------------------------------------

def _load(args):
    path = Path(args.input) if args.input else biomarker_path()
    sample = ingest_csv(path, columns=parse_columns(args.columns))
    descriptor = {
        "path": str(path),
        "fixture": args.input is None,
        "n": sample.n,
        "d": sample.d,
        "columns": list(sample.columns),
    }
    return sample, descriptor


def _cache(args) -> CalibrationCache:
    return CalibrationCache(args.cache)


def _emit(args, doc) -> None:
    text = dump_document(doc, args.json)
    if args.json is None:
        sys.stdout.write(text)


def _parse_params(items) -> dict:
    params = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigurationError(f"--param expects key=value, got {item!r}")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            params[key.strip()] = value.strip()
    return params


# -- commands ------------------------------------------------------------------

def cmd_index(args) -> int:
    sample, dataset = _load(args)
    cache = _cache(args)
    report = analyze(sample, args.subsets, cache, not args.no_calibrate, args.seed, dataset)
    doc = document(
        "index",
        {"dataset": dataset, "subsets": args.subsets, "seed": args.seed},
        {"cache": str(cache.path), "phi": report.phi},
        report.results(),
    )
    _emit(args, doc)
    return 0


def cmd_test(args) -> int:
    sample, dataset = _load(args)
    cache = _cache(args)
    policy = TestPolicy(
        sigma=args.sigma,
        sigma_r=args.sigma_r,
        sigma_n=args.sigma_n,
        allow_calibration=not args.no_calibrate,
        percentile_r=args.r,
        seed=args.seed,
        cache=cache,
    )
    result = run_independence_test(sample, args.alpha, policy)
    doc = document(
        "test",
        {"dataset": dataset, "alpha": args.alpha, "seed": args.seed, "sigma": args.sigma,
         "sigma_r": args.sigma_r, "sigma_n": args.sigma_n, "percentile_r": args.r},
        {"cache": str(cache.path), "sigma": result.sigma.to_dict(),
         "critical_source": result.critical_source, "calibration": result.calibration},
        {"test": result.to_dict()},
    )
    _emit(args, doc)
    return 0


def cmd_calibrate(args) -> int:
    what = [w.strip() for w in args.what.split(",") if w.strip()]
    unknown = set(what) - {"phi", "sigma", "percentiles"}
    if unknown:
        raise ConfigurationError(f"unknown calibration target(s): {', '.join(sorted(unknown))}")
    if "percentiles" in what and args.n is None:
        raise ConfigurationError("percentile calibration needs --n")
    cache = _cache(args)
    results = {}
    if "phi" in what:
        phi = calibrate_phi(args.d, seed=args.seed)
        cache.put_phi(phi)
        results["phi"] = phi.provenance_dict()
    if "sigma" in what:
        sigma = estimate_sigma_pi(args.d, args.r, args.sigma_n, args.seed)
        cache.put_sigma(sigma)
        results["sigma"] = sigma.to_dict()
    if "percentiles" in what:
        sigma = resolve_sigma(args.d, TestPolicy(seed=args.seed, cache=cache))
        table = calibrate_percentiles(args.d, args.n, args.r, args.seed, sigma)
        cache.put_percentiles(table)
        results["percentiles"] = table.to_dict()
    cache.save()
    doc = document(
        "calibrate",
        {"d": args.d, "n": args.n, "r": args.r, "sigma_n": args.sigma_n, "seed": args.seed, "what": what},
        {"cache": str(cache.path)},
        results,
    )
    _emit(args, doc)
    return 0


def _simulate(family, params, d, n, seed):
    family = family.lower()
    if family == "uniform":
        return sample_independent_uniform(d, n, seed)
    if family in ("equicorrelated", "normal"):
        return sample_equicorrelated_normal(EquicorrelatedSpec(d, float(params.get("rho", 0.0))), n, seed)
    if family in ARCHIMEDEAN_FAMILIES:
        if "theta" not in params:
            raise ConfigurationError(f"{family} needs --param theta=...")
        return sample_archimedean(CopulaSpec(family, float(params["theta"]), d), n, seed)
    if family == "fgm":
        if d != 3:
            raise DomainError("the F-G-M variants are trivariate")
        return sample_fgm(str(params.get("variant", "C")), float(params.get("theta", 1.0)), n, seed)
    if family in BIVARIATE_FAMILIES:
        if d != 2:
            raise DomainError(f"{family} is bivariate; use --d 2")
        return sample_bivariate_family(family, params, n, seed)
    raise ConfigurationError(f"unknown family {family!r}; choose from {', '.join(SIMULATE_FAMILIES)}")


def cmd_simulate(args) -> int:
    params = _parse_params(args.param)
    family = args.family.lower()
    d = args.d if args.d is not None else (2 if family in BIVARIATE_FAMILIES else 3)
    sample = _simulate(family, params, d, args.n, args.seed)
    write_sample_csv(sample, args.out)
    doc = document(
        "simulate",
        {"family": family, "params": params, "d": d, "n": args.n, "seed": args.seed},
        {"seed": args.seed},
        {"out": str(args.out), "rows": sample.n, "columns": list(sample.columns)},
    )
    _emit(args, doc)
    return 0


def cmd_kplot(args) -> int:
    sample, dataset = _load(args)
    curves = kendall_curves(sample, args.grid_size)
    rows = write_curves_csv(curves, args.out)
    decision = classify_class_membership(sample, args.tolerance, args.grid_size, curves)
    doc = document(
        "kplot",
        {"dataset": dataset, "grid_size": args.grid_size, "tolerance": args.tolerance},
        {"tolerance_rule": "DKW 95% band" if args.tolerance is None else "user"},
        {"curves_csv": str(args.out), "rows": rows, "patterns": len(curves),
         "decision": decision.to_dict()},
    )
    _emit(args, doc)
    return 0


def cmd_reproduce(args) -> int:
    tables = list(TABLE_IDS) if args.tables == ["all"] else args.tables
    for table in tables:
        if table not in TABLE_IDS:
            raise ConfigurationError(f"unknown table {table!r}; choose from {', '.join(TABLE_IDS)} or all")
    summaries = []
    for table in tables:
        result = reproduce_table(table, args.scale, args.seed)
        summary = result.summary()
        summary["files"] = result.write(args.out)
        summaries.append(summary)
        status = "PASS" if result.passed else "FAIL"
        print(f"{status} {table}: {summary['passed_cells']}/{summary['cells']} cells within tolerance",
              file=sys.stderr)
    doc = document(
        "reproduce",
        {"tables": tables, "scale": args.scale, "seed": args.seed},
        {"seed": args.seed},
        {"tables": summaries, "passed": all(s["passed"] for s in summaries)},
    )
    _emit(args, doc)
    if args.strict and not doc["results"]["passed"]:
        return 3
    return 0


# -- parser ----------------------------------------------------------------------

def _data_options(p):
    p.add_argument("--input", metavar="PATH", help="CSV file (default: bundled biomarker data)")
    p.add_argument("--columns", metavar="a,b,c", help="column names or 0-based indices to keep")


def _common_options(p):
    p.add_argument("--seed", type=int, default=0, help="root seed for all Monte Carlo work (default 0)")
    p.add_argument("--cache", metavar="PATH", help="calibration cache file (default $KENDEP_CACHE "
                   "or ~/.cache/kendep/calibration.json)")
    p.add_argument("--json", metavar="PATH", help="write the JSON report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kendep", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="dependence index I, standardized I* and level")
    _data_options(p)
    _common_options(p)
    p.add_argument("--subsets", choices=("full", "pairs", "triples", "all"), default="full",
                   help="which column subsets to report (default: the full vector)")
    p.add_argument("--no-calibrate", action="store_true",
                   help="fail instead of calibrating a missing standardizer for d > 3")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("test", help="test of total independence")
    _data_options(p)
    _common_options(p)
    p.add_argument("--alpha", type=float, default=0.05, help="significance level (default 0.05)")
    p.add_argument("--sigma", choices=("default", "monte_carlo", "table"), default="default",
                   help="source of sigma_Pi (default: exact for d = 2, Monte Carlo otherwise; "
                        "'table' uses the published constants)")
    p.add_argument("--r", type=int, default=10000, help="replicates for a percentile calibration")
    p.add_argument("--sigma-r", type=int, default=2000, help="replicates for a Monte Carlo sigma_Pi")
    p.add_argument("--sigma-n", type=int, default=5000, help="sample size for a Monte Carlo sigma_Pi")
    p.add_argument("--no-calibrate", action="store_true",
                   help="fail instead of running a missing sigma or percentile calibration")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("calibrate", help="Monte Carlo calibration into the cache")
    _common_options(p)
    p.add_argument("--d", type=int, required=True, help="dimension")
    p.add_argument("--n", type=int, help="sample size for a percentile table")
    p.add_argument("--r", type=int, default=2000, help="Monte Carlo replicates (default 2000)")
    p.add_argument("--sigma-n", type=int, default=5000, help="sample size for sigma_Pi (default 5000)")
    p.add_argument("--what", default="phi,sigma",
                   help="comma list from phi, sigma, percentiles (default phi,sigma)")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("simulate", help="write a simulated sample as CSV")
    p.add_argument("--family", required=True, help=f"one of {', '.join(SIMULATE_FAMILIES)}")
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="family parameter (repeatable)")
    p.add_argument("--d", type=int, help="dimension (default 3, or 2 for bivariate families)")
    p.add_argument("--n", type=int, required=True, help="number of rows")
    p.add_argument("--out", required=True, metavar="PATH", help="output CSV")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("kplot", help="Kendall curves of all reflections and the class decision")
    _data_options(p)
    p.add_argument("--out", required=True, metavar="PATH", help="output CSV of curves (long format)")
    p.add_argument("--grid-size", type=int, default=DEFAULT_GRID_SIZE)
    p.add_argument("--tolerance", type=float, help="band half-width (default: DKW 95%% band)")
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_kplot)

    p = sub.add_parser("reproduce", help="rerun published tables and compare")
    p.add_argument("tables", nargs="+", metavar="TABLE", help=f"{', '.join(TABLE_IDS)} or all")
    p.add_argument("--scale", type=float, help="fraction of the published replication count "
                   "(default: per-table desk scale; 1.0 = full)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="reproduction", metavar="DIR", help="directory for CSV output")
    p.add_argument("--json", metavar="PATH")
    p.add_argument("--strict", action="store_true", help="exit with status 3 if any cell fails")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (KendepError, OSError) as exc:
        print(f"kendep: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
