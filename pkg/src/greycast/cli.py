"""Command-line interface: fit, forecast, compare, reproduce.

The JSON report is the single source of truth; CSV and SVG outputs are
renderings of the same numbers. Every randomized run uses an explicit seed
(default 42), echoed in the report, so identical invocations produce
byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from . import optimizer as opt
from .charts import emit_chart
from .evaluation import compare, evaluate_model
from .exceptions import ConfigurationError, GreycastError
from .models import (MODEL_KINDS, RESTORE_EXACT, RESTORE_MODES,
                     SEARCHABLE_PARAMS, make_model, model_to_dict)
from .reproduce import CASES, reproduce_case
from .series import SplitSpec, fixture_names, load_fixture, read_csv, split
from .accumulation import ACCUMULATION_KINDS, CONFORMABLE

SCHEMA_VERSION = 1

_EXIT_CODES_HELP = """\
exit codes:
  0  success
  1  unexpected error
  2  configuration error (bad flags, split lengths, hyperparameters)
  3  CSV parse or validation error
  4  estimation error (singular least-squares system)
  5  infeasible model evaluation
  6  optimization found no feasible candidate
  7  unknown fixture or case name
  8  I/O error writing an artifact
"""


def _add_input_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="path to a period,value CSV file")
    src.add_argument("--case", dest="fixture",
                     help=f"bundled dataset name ({', '.join(fixture_names())})")


def _add_model_args(p):
    p.add_argument("--model", default="ccfngbm", choices=sorted(MODEL_KINDS),
                   help="model kind (default: ccfngbm)")
    p.add_argument("--r", type=float, help="fixed accumulation order")
    p.add_argument("--alpha", type=float, help="fixed derivative order")
    p.add_argument("--gamma", type=float, help="fixed Bernoulli exponent")
    p.add_argument("--optimize", action="store_true",
                   help="search the unfixed hyperparameters with GWO")
    p.add_argument("--accumulation", choices=ACCUMULATION_KINDS, default=None,
                   help="accumulation family for ccfngbm (default: conformable)")
    p.add_argument("--restore", choices=RESTORE_MODES, default=RESTORE_EXACT,
                   help="restoration mode (default: exact-inverse)")
    p.add_argument("--train", type=int, default=None,
                   help="number of leading calibration points (default: all)")
    p.add_argument("--pop", type=int, default=opt.DEFAULT_POPULATION, help="GWO population")
    p.add_argument("--iters", type=int, default=opt.DEFAULT_ITERATIONS, help="GWO iterations")
    p.add_argument("--seed", type=int, default=opt.DEFAULT_SEED, help="GWO RNG seed")
    p.add_argument("--bounds", default=None,
                   help='GWO bounds as "name=lo:hi,..." e.g. "r=0.05:3,gamma=-10:10"')


def _add_output_args(p):
    p.add_argument("--json", dest="json_path", help="write the JSON report here (default: stdout)")
    p.add_argument("--csv", dest="csv_path", help="write a period,actual,predicted,stage CSV here")
    p.add_argument("--svg", dest="svg_path", help="write an SVG chart here")
    p.add_argument("--trace-csv", dest="trace_path",
                   help="write the GWO convergence trace CSV here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="greycast",
        description="Grey-system forecasting with fractional accumulation and GWO tuning.",
        epilog=_EXIT_CODES_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"greycast {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="calibrate a model and report its fit")
    _add_input_args(p_fit)
    _add_model_args(p_fit)
    _add_output_args(p_fit)

    p_forecast = sub.add_parser("forecast", help="calibrate and extrapolate")
    _add_input_args(p_forecast)
    _add_model_args(p_forecast)
    p_forecast.add_argument("--horizon", type=int, required=True,
                            help="number of periods to forecast past the series")
    _add_output_args(p_forecast)

    p_compare = sub.add_parser("compare", help="evaluate several models on one split")
    _add_input_args(p_compare)
    p_compare.add_argument("--models", default="gm,dgm,ngbm,fngbm,ccfngbm",
                           help="comma-separated model kinds")
    p_compare.add_argument("--train", type=int, required=True)
    p_compare.add_argument("--accumulation", choices=ACCUMULATION_KINDS, default=None)
    p_compare.add_argument("--pop", type=int, default=opt.DEFAULT_POPULATION)
    p_compare.add_argument("--iters", type=int, default=opt.DEFAULT_ITERATIONS)
    p_compare.add_argument("--seed", type=int, default=opt.DEFAULT_SEED)
    _add_output_args(p_compare)

    p_repro = sub.add_parser("reproduce", help="re-run a bundled case study")
    p_repro.add_argument("--case", required=True, choices=sorted(CASES))
    p_repro.add_argument("--restore", choices=RESTORE_MODES, default=RESTORE_EXACT)
    _add_output_args(p_repro)
    return parser


def _parse_bounds(text):
    if not text:
        return None
    bounds = dict(opt.DEFAULT_BOUNDS)
    for item in text.split(","):
        try:
            name, span = item.split("=")
            lo, hi = span.split(":")
            bounds[name.strip()] = (float(lo), float(hi))
        except ValueError:
            raise ConfigurationError(f"cannot parse bounds item {item!r}") from None
        if name.strip() not in opt.DEFAULT_BOUNDS:
            raise ConfigurationError(f"unknown bound name {name.strip()!r}")
    return bounds


def _load_series(args):
    if args.fixture:
        return load_fixture(args.fixture)
    return read_csv(args.input)


def _resolve_split(series, train_len):
    if train_len is None:
        train_len = len(series)
    return SplitSpec(train_len, len(series) - train_len)


def _fit_model(args, train):
    """Build + fit the requested model, optimizing unfixed hyperparameters."""
    kind = args.model
    searchable = SEARCHABLE_PARAMS[kind]
    fixed = {name: getattr(args, name)
             for name in ("r", "alpha", "gamma")
             if getattr(args, name) is not None}
    unknown = set(fixed) - set(searchable)
    if unknown:
        raise ConfigurationError(
            f"model {kind!r} does not take fixed hyperparameters {sorted(unknown)}"
        )
    extra = {}
    if kind == "ccfngbm" and args.accumulation:
        extra["accumulation"] = args.accumulation
    if kind != "dgm":
        extra["restore"] = args.restore

    search_info = None
    if args.optimize:
        free = [n for n in searchable if n not in fixed]
        if not free:
            raise ConfigurationError("--optimize given but every hyperparameter is fixed")
        cfg = opt.GwoConfig(population=args.pop, iterations=args.iters, seed=args.seed,
                            bounds=_parse_bounds(args.bounds) or dict(opt.DEFAULT_BOUNDS))
        outcome = opt.optimize(train, kind, cfg, accumulation=args.accumulation,
                               fixed=fixed or None)
        params = outcome.params
        search_info = {
            "seed": cfg.seed,
            "population": cfg.population,
            "iterations": cfg.iterations,
            "bounds": {n: list(cfg.bounds[n]) for n in free},
            "best_fitness": outcome.fitness,
            "trace": [
                {"iteration": p.iteration, "best_fitness": p.best_fitness,
                 "position": list(p.position)}
                for p in outcome.trace
            ],
        }
    else:
        missing = [n for n in searchable if n not in fixed]
        if missing:
            raise ConfigurationError(
                f"model {kind!r} needs {missing} fixed (or pass --optimize)"
            )
        params = fixed
    model = make_model(kind, **params, **extra).fit(train)
    return model, params, search_info, fixed


def _series_rows(report):
    rows = list(report["evaluation"]["per_point"])
    for item in report.get("forecast", []):
        rows.append({"period": item["period"], "stage": "forecast",
                     "actual": None, "predicted": item["value"]})
    return rows


def _write_outputs(args, report):
    doc = json.dumps(report, indent=2)
    if args.json_path:
        with open(args.json_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(doc + "\n")
    else:
        print(doc)
    if args.csv_path:
        rows = _series_rows(report)
        with open(args.csv_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("period,actual,predicted,stage\n")
            for row in rows:
                actual = "" if row["actual"] is None else repr(row["actual"])
                fh.write(f"{row['period']},{actual},{row['predicted']!r},{row['stage']}\n")
    if args.svg_path:
        rows = _series_rows(report)
        actual = ([r["period"] for r in rows if r["actual"] is not None],
                  [r["actual"] for r in rows if r["actual"] is not None])
        predicted = ([r["period"] for r in rows if r["stage"] in ("fit", "holdout")],
                     [r["predicted"] for r in rows if r["stage"] in ("fit", "holdout")])
        forecast = ([r["period"] for r in rows if r["stage"] == "forecast"],
                    [r["predicted"] for r in rows if r["stage"] == "forecast"])
        emit_chart(actual, predicted, forecast, args.svg_path,
                   title=report.get("label", ""))
    if getattr(args, "trace_path", None) and report.get("optimize"):
        with open(args.trace_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("iteration,best_fitness,r,alpha,gamma\n")
            kind = report["model"]["kind"]
            fixed = report.get("fixed_hyperparams") or {}
            for row in opt.trace_rows(kind, _trace_points(report), fixed=fixed):
                fh.write("{iteration},{best_fitness},{r},{alpha},{gamma}\n".format(**row))


def _trace_points(report):
    return [
        opt.TracePoint(p["iteration"], p["best_fitness"], tuple(p["position"]))
        for p in report["optimize"]["trace"]
    ]


def _run_fit(args, horizon: int = 0):
    series = _load_series(args)
    spec = _resolve_split(series, args.train)
    train, holdout = split(series, spec)
    model, params, search_info, fixed = _fit_model(args, train)
    evaluation = evaluate_model(model, train, holdout if len(holdout) else None)
    report = {
        "schema": SCHEMA_VERSION,
        "command": args.command,
        "input": args.fixture or args.input,
        "label": series.label,
        "seed": args.seed,
        "train_len": spec.train_len,
        "holdout_len": spec.holdout_len,
        "model": model_to_dict(model),
        "hyperparams": params,
        "fixed_hyperparams": fixed,
        "evaluation": evaluation.to_dict(),
    }
    if search_info:
        report["optimize"] = search_info
    total_extra = spec.holdout_len + horizon
    if horizon > 0:
        predicted = model.predict(total_extra)
        report["forecast"] = [
            {"index": spec.train_len + 1 + i,
             "period": series.start_period + spec.train_len + i,
             "value": float(v)}
            for i, v in enumerate(predicted)
            if spec.train_len + i >= len(series)  # points past the observed series
        ]
    _write_outputs(args, report)
    return 0


def _run_compare(args):
    series = _load_series(args)
    spec = _resolve_split(series, args.train)
    kinds = [k.strip() for k in args.models.split(",") if k.strip()]
    for kind in kinds:
        if kind not in MODEL_KINDS:
            raise ConfigurationError(f"unknown model kind {kind!r}")
    cfg = opt.GwoConfig(population=args.pop, iterations=args.iters, seed=args.seed)
    table = compare(series, spec, kinds, cfg, accumulation=args.accumulation)
    report = {
        "schema": SCHEMA_VERSION,
        "command": "compare",
        "input": args.fixture or args.input,
        "label": series.label,
        "seed": args.seed,
        "table": table.to_dict(),
    }
    doc = json.dumps(report, indent=2)
    if args.json_path:
        with open(args.json_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(doc + "\n")
    else:
        print(doc)
    print(table.render_text(), file=sys.stderr)
    if args.csv_path:
        with open(args.csv_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(table.to_csv())
    return 0


def _run_reproduce(args):
    report = reproduce_case(args.case, restore_mode=args.restore)
    report = {"schema": SCHEMA_VERSION, "command": "reproduce", **report}
    doc = json.dumps(report, indent=2)
    if args.json_path:
        with open(args.json_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(doc + "\n")
    else:
        print(doc)
    best = report["modes"][report["best_mode"]]
    if args.csv_path:
        with open(args.csv_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("period,actual,predicted,stage\n")
            for row in best["evaluation"]["per_point"]:
                fh.write(f"{row['period']},{row['actual']!r},{row['predicted']!r},{row['stage']}\n")
    if args.svg_path:
        rows = best["evaluation"]["per_point"]
        actual = ([r["period"] for r in rows], [r["actual"] for r in rows])
        predicted = ([r["period"] for r in rows], [r["predicted"] for r in rows])
        forecast = ([], [])
        if "forecast" in report:
            last = rows[-1]["period"]
            forecast = ([r["period"] for r in report["forecast"]["values"] if r["period"] > last],
                        [r["value"] for r in report["forecast"]["values"] if r["period"] > last])
        emit_chart(actual, predicted, forecast, args.svg_path, title=report["fixture"])
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "fit":
            return _run_fit(args)
        if args.command == "forecast":
            if args.horizon < 1:
                raise ConfigurationError(f"--horizon {args.horizon} must be >= 1")
            return _run_fit(args, horizon=args.horizon)
        if args.command == "compare":
            return _run_compare(args)
        if args.command == "reproduce":
            return _run_reproduce(args)
        raise ConfigurationError(f"unknown command {args.command!r}")
    except LookupError as exc:
        print(f"greycast: {exc}", file=sys.stderr)
        return 7
    except GreycastError as exc:
        print(f"greycast: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"greycast: {exc}", file=sys.stderr)
        return 8


if __name__ == "__main__":
    sys.exit(main())
