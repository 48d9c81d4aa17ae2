"""Command-line front end.

Exit status: 0 when every check passes, 1 when some check fails, 2 for
usage errors (bad flags, bad config fields, invalid inputs), 3 for I/O
errors.  Reports are JSON with sorted keys and no timing data, so the
same inputs and seed give byte-identical files; wall-clock time goes to
a separate ``<name>.meta.json``.
"""

from __future__ import annotations

import argparse
import json
import os
import platform
import sys
import time

import numpy as np

from . import __version__, batteries, ergodic, fourier, maximal, metric, operators, series
from .errors import MeanlabError
from .report import Report, atomic_write, matrix_from_json, traces_to_csv

USAGE, IO = 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except UnicodeDecodeError as exc:
        raise UsageError(f"{path}: not a text file ({exc})") from exc


def _read_json(path: str):
    text = _read(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from exc


def _complex(text) -> complex:
    try:
        return complex(str(text).replace(" ", ""))
    except ValueError as exc:
        raise UsageError(f"expected a complex number, got {text!r}") from exc


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


# ---------------------------------------------------------------- subcommands

def cmd_sum(args) -> Report:
    if args.series:
        spec = series.SeriesSpec.from_json(_read_json(args.series))
    elif args.kind == "geometric":
        spec = series.SeriesSpec.geometric(_complex(args.a))
    elif args.kind == "weighted-geometric":
        spec = series.SeriesSpec.weighted_geometric(_complex(args.a), args.degree)
    elif args.kind == "custom":
        spec = series.SeriesSpec.custom(args.rule)
    else:
        raise UsageError("give --series FILE or --kind")
    rep = Report(f"sum-{args.method}")
    if args.method == "cesaro":
        res = series.cesaro_sum(spec, args.n, tol=args.tol)
    elif args.method == "abel":
        grid = tuple(_floats(args.r_grid)) if args.r_grid else (0.9, 0.99, 0.999)
        res = series.abel_sum(spec, r_grid=grid)
    else:
        res = series.classical_sum(spec, args.n, tol=args.tol)
    diag = dict(res.diagnostics)
    rep.values["estimate"] = res.estimate
    rep.values["divergent"] = res.divergent
    trace = {"index": np.arange(len(res.trace.values)), "value": res.trace.values}
    if "residuals" in diag:
        trace["residual"] = diag.pop("residuals")
    rep.values["diagnostics"] = diag
    rep.traces["trace"] = trace
    if args.expect is not None:
        if res.estimate is None:
            rep.check("estimate exists", 0.0, 1.0, rel="==")
        else:
            rep.check("|estimate - expected|", abs(res.estimate - _complex(args.expect)),
                      args.expect_tol)
    return rep


def cmd_spectral(args) -> Report:
    x = matrix_from_json(_read_json(args.matrix))
    pairing = tuple(_floats(args.pairing)) if args.pairing else (np.inf, np.inf)
    if args.task == "radius":
        sr = operators.spectral_radius(x, n_max=args.n_max, pairing=pairing)
        rep = Report("spectral-radius")
        rep.values.update(sr.to_dict())
        tol = max(1e-2, 5 / args.n_max)
        rep.check("|gelfand - eigen radius|", abs(sr.gelfand_estimate - sr.eigen_radius), tol)
        return rep
    if args.task == "neumann":
        res = operators.neumann_inverse(x, pairing=pairing)
        rep = Report("neumann")
        rep.check("||(I-a)S_n - I||", res.residual, 1e-10)
        rep.values.update({"n_terms": res.n_terms, "tail_bound": res.tail_bound,
                           "inverse": res.inverse})
        return rep
    return operators.operator_average_report(x, args.n_max)


def cmd_maximal(args) -> Report:
    f = maximal.GridFunction.from_csv(_read(args.input))
    rep = Report("maximal")
    prof = maximal.discrete_maximal(f)
    rep.traces["profile"] = {"l": prof.points, "fstar": prof.values, "a": prof.witness_a,
                             "b": prof.witness_b}
    lams = _floats(args.lambdas) if args.lambdas else list(
        prof.values.max() * np.logspace(-3, -0.001, 20))
    rep.extend(maximal.weak_type_report(f, lams), "weak: ")
    for p in _floats(args.p):
        rep.extend(maximal.lp_bound_report(f, p), f"p={p:g}: ")
    return rep


def cmd_fourier(args) -> Report:
    f = fourier.SampledCircleFunction.from_csv(_read(args.input))
    params = _floats(args.params)
    return fourier.summation_error_report(f, args.method, [int(p) if args.method == "fejer" else p
                                                           for p in params])


def cmd_ergodic(args) -> Report:
    sys_ = ergodic.system_from_json(_read_json(args.system))
    rng = np.random.default_rng(args.seed)
    if args.task == "counting":
        return ergodic.counting_measure_counterexample(args.n)
    if isinstance(sys_, ergodic.FiniteSystem):
        f = rng.exponential(size=sys_.size)
        if args.task == "krylov-bogolyubov":
            start = ergodic.MeasureFunctional.point_mass(sys_.size, 0)
            return ergodic.krylov_bogolyubov_report(sys_, start, [0, 1, 10, args.n])
        if args.task == "transference":
            return ergodic.transference_maximal(sys_, f, args.n).report
        return ergodic.birkhoff_average(sys_, f, args.n).report
    f = ergodic.CylinderFunction.coordinate(sys_.alphabet, 0)
    if args.task == "transference":
        return ergodic.transference_maximal(sys_, f, args.n).report
    if args.task == "krylov-bogolyubov":
        raise UsageError("krylov-bogolyubov needs a permutation system")
    return ergodic.birkhoff_average(sys_, f, args.n, seed=args.seed).report


def cmd_metric(args) -> Report:
    space = metric.UltrametricSpace.from_json(_read_json(args.space))
    if args.task == "dimension":
        est = metric.box_dimension(space, args.a)
        rep = Report("box-dimension")
        rep.values.update({"estimate": est.slope, "ci": est.ci, "estimator": est.estimator})
        rep.traces["scales"] = est.trace()
        return rep
    if args.task == "trichotomy":
        return metric.ball_trichotomy_check(space, args.trials, args.seed)
    if args.task == "doubling":
        rep = metric.doubling_constant(space, "space", seed=args.seed)
        rep.extend(metric.doubling_constant(space, "measure", seed=args.seed), "measure: ")
        return rep
    return metric.snowflake_check(space, args.a, args.trials, args.seed)


def cmd_battery(args) -> Report | None:
    if args.action == "list":
        for name, desc in batteries.list_batteries(args.name or ""):
            print(f"{name}\t{desc}")
        return None
    if not args.name:
        raise UsageError("battery run needs a battery name")
    b = batteries.resolve(args.name)
    return batteries.run_battery(b.name, args.params, args.seed)


# ---------------------------------------------------------------- parser

def _battery_epilog() -> str:
    lines = ["batteries (CSV trace columns):"]
    for name, b in sorted(batteries.BATTERIES.items()):
        lines.append(f"  {name}: {b.csv or 'no traces'}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of option values (keys as long flag names)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="directory for report JSON and CSV traces")
    common.add_argument("--csv", action="store_true", help="also write CSV traces")
    common.add_argument("--quiet", action="store_true")

    ap = argparse.ArgumentParser(prog="meanlab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sum", parents=[common], help="sum a series",
                       description="CSV trace columns: index, value_re, value_im, residual")
    p.add_argument("--series", help="series JSON file")
    p.add_argument("--kind", choices=["geometric", "weighted-geometric", "custom"])
    p.add_argument("--a", default="0.5", help="ratio, e.g. -1 or 0.5+0.5j")
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--rule")
    p.add_argument("--method", choices=["cesaro", "abel", "classical"], default="cesaro")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--tol", type=float, default=1e-3,
                   help="stabilization tolerance; Cesaro means move like 1/n, so keep tol*n >> 1")
    p.add_argument("--r-grid", help="comma-separated radii for the Abel method")
    p.add_argument("--expect", help="expected value; adds a check")
    p.add_argument("--expect-tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_sum)

    p = sub.add_parser("spectral", parents=[common], help="matrix spectral experiments",
                       description="CSV trace columns (average): n, norm_A_n, bound, "
                                   "double_average_error")
    p.add_argument("--matrix", required=True, help="matrix JSON file (rows of [re, im])")
    p.add_argument("--task", choices=["radius", "neumann", "average"], default="radius")
    p.add_argument("--pairing", help="domain,codomain norm exponents, e.g. 2,2")
    p.add_argument("--n-max", type=int, default=512)
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("maximal", parents=[common], help="maximal function of a grid function",
                       description="CSV trace columns: profile (l, fstar, a, b); "
                                   "weak: levels (lambda, level_set_size, bound)")
    p.add_argument("--input", required=True, help="CSV with columns j, re, im")
    p.add_argument("--lambdas", help="comma-separated levels")
    p.add_argument("--p", default="1.5,2,3", help="comma-separated exponents > 1")
    p.set_defaults(func=cmd_maximal)

    p = sub.add_parser("fourier", parents=[common], help="Fejer or Abel means on the circle",
                       description="CSV trace columns: param, sup_error")
    p.add_argument("--input", required=True, help="CSV with columns theta, re, im")
    p.add_argument("--method", choices=["fejer", "abel"], default="fejer")
    p.add_argument("--params", default="16,256", help="n values (fejer) or r values (abel)")
    p.set_defaults(func=cmd_fourier)

    p = sub.add_parser("ergodic", parents=[common], help="measure-preserving systems",
                       description="CSV trace columns: birkhoff points (point, average, "
                                   "deviation); counting averages (n, l1_mass, sup)")
    p.add_argument("--system", required=True, help="system JSON file")
    p.add_argument("--task", choices=["birkhoff", "transference", "krylov-bogolyubov",
                                      "counting"], default="birkhoff")
    p.add_argument("--n", type=int, default=100)
    p.set_defaults(func=cmd_ergodic)

    p = sub.add_parser("metric", parents=[common], help="ultrametric space experiments",
                       description="CSV trace columns (dimension): log_inv_r, log_N")
    p.add_argument("--space", required=True, help="space JSON file")
    p.add_argument("--task", choices=["dimension", "trichotomy", "doubling", "snowflake"],
                   default="dimension")
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("battery", parents=[common], help="run or list named batteries",
                       epilog=_battery_epilog(),
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("action", choices=["run", "list"])
    p.add_argument("name", nargs="?", help="battery name (run) or name prefix (list)")
    p.set_defaults(func=cmd_battery, params=None)
    return ap


def _apply_config(args, parser):
    if not args.config:
        return
    cfg = _read_json(args.config)
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    for key, val in cfg.items():
        attr = key.replace("-", "_")
        if args.command == "battery" and attr in ("battery", "params"):
            setattr(args, "name" if attr == "battery" else "params", val)
            continue
        if not hasattr(args, attr) or attr in ("func", "command", "config"):
            raise UsageError(f"unknown config field {key!r}")
        setattr(args, attr, val)


def _write_outputs(rep: Report, args, elapsed: float):
    text = rep.to_json(indent=2) + "\n"
    if not args.out:
        if not args.quiet:
            sys.stdout.write(text)
        return
    os.makedirs(args.out, exist_ok=True)
    base = os.path.join(args.out, rep.name)
    atomic_write(base + ".json", text)
    meta = {"wall_clock_s": elapsed, "seed": args.seed, "version": __version__,
            "python": platform.python_version(), "command": args.command}
    atomic_write(base + ".meta.json", json.dumps(meta, sort_keys=True, indent=2) + "\n")
    if args.csv:
        for key, cols in rep.traces.items():
            atomic_write(f"{base}.{key.replace(' ', '_').replace(':', '')}.csv",
                         traces_to_csv(cols))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # argparse exits with status 2 on bad flags
    try:
        _apply_config(args, parser)
        if args.command == "battery" and args.action == "run" and args.name:
            batteries.validate(batteries.resolve(args.name), args.params)
        t0 = time.perf_counter()
        rep = args.func(args)
        elapsed = time.perf_counter() - t0
        if rep is None:
            return 0
        rep.values.setdefault("seed", args.seed)
        _write_outputs(rep, args, elapsed)
    except (UsageError, MeanlabError) as exc:
        print(f"meanlab: error: {exc}", file=sys.stderr)
        return USAGE
    except OSError as exc:
        print(f"meanlab: I/O error: {exc}", file=sys.stderr)
        return IO
    if not args.quiet:
        n_bad = len(rep.failures)
        status = "PASS" if rep.passed else "FAIL"
        print(f"{status} {rep.name}: {len(rep.checks) - n_bad}/{len(rep.checks)} checks passed",
              file=sys.stderr)
        for c in rep.failures:
            print(f"  failed: {c.name}: {c.lhs!r} {c.rel} {c.rhs!r}", file=sys.stderr)
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
