"""Command-line interface: fit, rl, select, bootstrap, and simulate
subcommands with machine-readable JSON/CSV outputs.

Every output embeds the seed and a content hash of the input data so
reruns with identical inputs are byte-identical. Exit codes: 0 success,
1 usage error, 2 data error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import tempfile

import numpy as np

from . import fitters, inference, returns, simulation
from .models import FitResult, ModelSpec
from .series import AnnualSeries, ParseError, ingest_csv

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


def _atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-nsgevlm-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _data_hash(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()[:16]


def _json_dump(obj) -> str:
    def default(o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, (np.floating, np.integer)):
            return o.item()
        raise TypeError(f"not serializable: {type(o)}")

    return json.dumps(obj, indent=2, sort_keys=True, default=default) + "\n"


def _csv_text(header: list[str], rows) -> str:
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def _parse_model(arg: str, logscale: str | None) -> ModelSpec:
    arg = arg.lower()
    if arg in ("gev10", "gev11", "gev20", "stationary"):
        return ModelSpec(arg)
    terms = tuple(m.strip() for m in arg.split("+") if m.strip())
    ls = tuple(m.strip() for m in (logscale or "").split("+") if m.strip())
    return ModelSpec.covariate(terms, ls)


def _fit_payload(fit: FitResult, seed: int, data_hash: str) -> dict:
    diag = {k: (v.item() if isinstance(v, (np.floating, np.integer,
                                           np.bool_)) else v)
            for k, v in fit.diagnostics.items()}
    return {
        "method": fit.method,
        "model": {
            "family": fit.spec.family,
            "location_terms": list(fit.spec.location_terms),
            "logscale_terms": list(fit.spec.logscale_terms),
        },
        "params": {
            "mu_coef": fit.params.mu_coef.tolist(),
            "logsigma_coef": fit.params.logsigma_coef.tolist(),
            "xi": fit.params.xi,
            "mu_sigma_mult": fit.params.mu_sigma_mult,
        },
        "std_residuals": fit.std_residuals.tolist(),
        "diagnostics": {
            "status": diag.get("status"),
            "chi": diag.get("chi"),
            "fallback": diag.get("fallback", False),
            "n": diag.get("n"),
        },
        "seed": seed,
        "data_hash": data_hash,
    }


def _load_fit(path: str) -> FitResult:
    with open(path) as fh:
        payload = json.load(fh)
    model = payload["model"]
    if model["family"] == "covariate":
        spec = ModelSpec.covariate(model["location_terms"],
                                   model["logscale_terms"])
    else:
        spec = ModelSpec(model["family"])
    from .models import NsGevParams

    p = payload["params"]
    params = NsGevParams(np.array(p["mu_coef"]),
                         np.array(p["logsigma_coef"]), p["xi"],
                         p.get("mu_sigma_mult", 0.0))
    return FitResult(method=payload["method"], spec=spec, params=params,
                     std_residuals=np.array(payload["std_residuals"]),
                     diagnostics=payload["diagnostics"])


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output file path")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nsgevlm")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a model to a year,value CSV")
    p.add_argument("data")
    p.add_argument("--method", required=True,
                   choices=sorted(fitters.METHODS))
    p.add_argument("--model", default="gev11",
                   help="gev10|gev11|gev20|stationary or '+'-joined terms")
    p.add_argument("--logscale", default=None,
                   help="'+'-joined log-scale terms for covariate models")
    p.add_argument("--qq-out", default=None, help="Q-Q plot data CSV path")
    _add_common(p)

    p = sub.add_parser("rl", help="return levels from a fit JSON")
    p.add_argument("fit_json")
    p.add_argument("--T", default="2,10,20,50,100,200",
                   help="comma-separated return periods")
    p.add_argument("--t-range", default=None,
                   help="lo:hi time range for the conventional curve")
    p.add_argument("--kind", choices=["conventional", "parey", "both"],
                   default="both")
    _add_common(p)

    p = sub.add_parser("select", help="cross-validated GLD model selection")
    p.add_argument("data")
    p.add_argument("--models", required=True,
                   help="semicolon-separated name=terms entries, e.g. "
                        "'m0=stationary;m1=t;m3=t+soi'")
    p.add_argument("--repeats", type=int, default=20)
    p.add_argument("--folds", type=int, default=5)
    _add_common(p)

    p = sub.add_parser("bootstrap", help="parametric-bootstrap SEs")
    p.add_argument("data")
    p.add_argument("--method", required=True,
                   choices=sorted(fitters.METHODS))
    p.add_argument("--model", default="gev11")
    p.add_argument("--logscale", default=None)
    p.add_argument("--B", type=int, default=300)
    _add_common(p)

    p = sub.add_parser("simulate", help="Monte Carlo estimator comparison")
    p.add_argument("--family", default="gev11",
                   choices=["gev10", "gev11", "gev20"])
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--N", type=int, default=1000)
    p.add_argument("--xi", default="-0.35,-0.25,-0.15,-0.05,0,0.05,0.15,0.25,0.35")
    p.add_argument("--methods", default=",".join(simulation.DEFAULT_METHODS))
    _add_common(p)
    return ap


def _cmd_fit(args) -> int:
    series = ingest_csv(args.data)
    spec = _parse_model(args.model, args.logscale)
    if args.method.startswith("lme-sta"):
        fit = fitters.fit(series, args.method, ModelSpec("stationary"))
    else:
        fit = fitters.fit(series, args.method, spec)
    payload = _fit_payload(fit, args.seed, _data_hash(args.data))
    _atomic_write(args.out, _json_dump(payload))
    if args.qq_out:
        rows = returns.qq_plot_data(fit)
        _atomic_write(args.qq_out,
                      _csv_text(["theoretical_gumbel_quantile",
                                 "ordered_std_residual"], rows))
    print(f"fit written to {args.out} (seed={args.seed})")
    return EXIT_OK


def _cmd_rl(args) -> int:
    fit = _load_fit(args.fit_json)
    periods = [int(x) for x in args.T.split(",")]
    n = int(fit.diagnostics.get("n") or 0)
    out_rows = []
    if args.kind in ("parey", "both"):
        for T in periods:
            out_rows.append(["parey", T, "",
                             f"{returns.parey_rl(fit.params, fit.spec, T):.6g}"])
    if args.kind in ("conventional", "both"):
        if args.t_range:
            lo, hi = (int(x) for x in args.t_range.split(":"))
        else:
            lo, hi = 1, max(n, 1)
        ts = np.arange(lo, hi + 1, dtype=float)
        for T in periods:
            vals = returns.conventional_rl(fit.params, fit.spec, T, ts)
            for t, v in zip(ts, vals):
                out_rows.append(["conventional", T, int(t), f"{v:.6g}"])
    _atomic_write(args.out, _csv_text(["kind", "T", "t", "value"], out_rows))
    print(f"return levels written to {args.out}")
    return EXIT_OK


def _cmd_select(args) -> int:
    series = ingest_csv(args.data)
    specs: dict[str, ModelSpec] = {}
    for entry in args.models.split(";"):
        name, terms = entry.split("=", 1)
        specs[name.strip()] = _parse_model(terms.strip(), None)

    def fit_fn(s, spec):
        if spec.family == "stationary":
            return fitters.fit_stationary(s, "gev")
        return fitters.fit_prop_covariate(s, spec)

    report = inference.cv_gld(series, specs, fit_fn, repeats=args.repeats,
                              folds=args.folds, seed=args.seed)
    payload = {
        "models": {m: {"cv_gld": float(g), "skipped_folds": int(s),
                       "flagged": bool(f)}
                   for m, g, s, f in zip(report.model_names, report.gld,
                                         report.skipped_folds,
                                         report.flagged)},
        "repeats": report.repeats,
        "folds": report.folds,
        "seed": args.seed,
        "data_hash": _data_hash(args.data),
        "best": report.model_names[int(np.argmin(report.gld))],
    }
    _atomic_write(args.out, _json_dump(payload))
    print(f"selection written to {args.out} (best={payload['best']})")
    return EXIT_OK


def _cmd_bootstrap(args) -> int:
    series = ingest_csv(args.data)
    spec = _parse_model(args.model, args.logscale)
    fit = fitters.fit(series, args.method, spec)
    report = inference.bootstrap_se(fit, series, B=args.B, seed=args.seed)
    payload = {
        "B": report.B,
        "params": {name: {"se": float(se), "mean": float(mean)}
                   for name, se, mean in zip(report.param_names, report.se,
                                             report.mean)},
        "failure_count": report.failure_count,
        "flagged": report.flagged,
        "seed": args.seed,
        "data_hash": _data_hash(args.data),
    }
    _atomic_write(args.out, _json_dump(payload))
    print(f"bootstrap written to {args.out}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    design = simulation.SimDesign(
        family=args.family,
        xi_grid=tuple(float(x) for x in args.xi.split(",")),
        n=args.n,
        N=args.N,
    )
    methods = tuple(m.strip() for m in args.methods.split(","))
    report = simulation.run_simulation(design, methods, seed=args.seed)
    table = report.table.copy()
    table["seed"] = args.seed
    _atomic_write(args.out, table.to_csv(index=False))
    print(f"simulation written to {args.out} (seed={args.seed})")
    return EXIT_OK


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    handlers = {
        "fit": _cmd_fit,
        "rl": _cmd_rl,
        "select": _cmd_select,
        "bootstrap": _cmd_bootstrap,
        "simulate": _cmd_simulate,
    }
    try:
        return handlers[args.command](args)
    except (ParseError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, np.linalg.LinAlgError, FloatingPointError) as exc:
        diag_path = getattr(args, "out", None)
        if diag_path:
            try:
                _atomic_write(diag_path, _json_dump(
                    {"error": str(exc), "status": "numerical-failure"}))
            except OSError:
                pass
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
