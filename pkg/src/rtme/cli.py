"""Command-line front end: simulate, detect, decide, estimate and evaluate.

Exit codes: 0 success, 1 I/O failure, 2 usage or invalid input, 3 convergence
warning (R-hat above 1.1; results are still written).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .detect import detect_reporting
from .mcmc import ModelSpec, SamplerConfig, run_mcmc, summarize
from .metrics import scaled_errors, wfm
from .simulate import SimConfig, simulate_replicates, truth_rows
from .smoothing import CASE_SMOOTHING, MEASUREMENT_ERROR, choose_approach, smooth_cases
from .types import CaseSeries, ReportingModel, SerialIntervalEstimate, ValidationError

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_RHAT = 0, 1, 2, 3
RHAT_LIMIT = 1.1


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _config_hash(args: dict) -> str:
    payload = json.dumps(args, sort_keys=True, default=str)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def metadata(command: str, seed, config: dict) -> dict:
    return {"tool": "rtme", "version": __version__, "command": command,
            "seed": seed, "config_hash": _config_hash(config)}


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return str(obj)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def csv_text(header, rows, meta: dict | None = None) -> str:
    buf = io.StringIO()
    if meta is not None:
        buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def read_csv_rows(path: Path) -> list[dict]:
    text = _read(path)
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return list(csv.DictReader(lines))


def _read(path) -> str:
    path = Path(path)
    if not path.exists():
        raise UsageError(f"no such file: {path}")
    return path.read_text(encoding="utf-8")


def load_cases(path) -> CaseSeries:
    return CaseSeries.from_csv(_read(path))


def load_serial(paths) -> tuple:
    if not paths:
        raise UsageError("at least one --serial JSON file is required")
    try:
        return tuple(SerialIntervalEstimate.from_json(_read(p)) for p in paths)
    except (json.JSONDecodeError, KeyError) as exc:
        raise UsageError(f"malformed serial interval JSON: {exc}") from None


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def sampler_from(args) -> SamplerConfig:
    return SamplerConfig(chains=args.chains, burn_in=args.burnin, total_iterations=args.iters,
                         thin=args.thin, rng_seed=args.seed, workers=args.workers)


def cmd_simulate(args) -> int:
    cfg = SimConfig(trend_pattern=args.tp, data_scenario=args.ds, length_days=args.days,
                    seed_cases=args.seed_cases, rng_seed=args.seed, sigma_r=args.sigma_r)
    runs, attempts = simulate_replicates(cfg, args.reps)
    out = Path(args.out)
    meta = metadata("simulate", args.seed, _effective(args))
    entries = []
    for i, sim in enumerate(runs, start=1):
        d = out / f"rep_{i:03d}"
        rows = truth_rows(sim)
        write_text(d / "truth.csv", csv_text(list(rows[0].keys()), [list(r.values()) for r in rows], meta))
        write_text(d / "observed.csv", "# " + json.dumps(meta, sort_keys=True) + "\n" + sim.observed.to_csv())
        serial_files = []
        for j, comp in enumerate(sim.serial_given, start=1):
            name = f"serial_{j}.json"
            write_text(d / name, comp.to_json() + "\n")
            serial_files.append(name)
        truth = {
            "metadata": meta,
            "replicate": i,
            "sim_seed": sim.config.rng_seed,
            "config": asdict(sim.config),
            "beta": sim.garma.beta, "phi": sim.garma.phi, "sigma_r": sim.garma.sigma_r,
            "lambda": sim.lam, "wstar": sim.wstar.pmf,
            "components": [c.pmf for c in sim.components],
            "reporting": sim.reporting.to_dict() if sim.reporting is not None else None,
            "serial_files": serial_files,
        }
        write_text(d / "manifest.json", dump_json(truth))
        entries.append(d.name)
    write_text(out / "manifest.json", dump_json({
        "metadata": meta, "replicates": entries, "attempts": attempts,
        "discarded": attempts - len(runs)}))
    if len(runs) < args.reps:
        print(f"only {len(runs)} of {args.reps} replicates passed the viability filter", file=sys.stderr)
    return EXIT_OK


def cmd_detect(args) -> int:
    series = load_cases(args.cases)
    result = detect_reporting(series, proxy_window=args.proxy_window)
    body = result.to_dict()
    body["metadata"] = metadata("detect", None, _effective(args))
    _emit(args.out, dump_json(body))
    return EXIT_OK


def _fit(series, components, reporting, args, theta_center=None):
    spec = ModelSpec(series, components, reporting, ar_order=args.ar_order,
                     theta_prior_center=theta_center)
    draws = run_mcmc(spec, sampler_from(args))
    return spec, draws, summarize(draws)


def _detection(args, series):
    if getattr(args, "detection", None):
        obj = json.loads(_read(args.detection))
        rep = ReportingModel.from_dict(obj)
        return rep, (tuple(rep.theta) if "theta_prior" in obj else None), obj
    det = detect_reporting(series, proxy_window=args.proxy_window)
    return det.reporting, tuple(det.theta_prior), det.to_dict()


def _decide(args, series, components):
    rep, center, det = _detection(args, series)
    center = center if args.prior == "informative" else None
    me = _fit(series, components, rep, args, center)
    smoothed = series.with_counts(smooth_cases(series.counts, args.window))
    sm = _fit(smoothed, components, None, args)
    decision = choose_approach(me[2]["rt"]["mean"], sm[2]["rt"]["mean"])
    return decision, det, me, sm


def cmd_decide(args) -> int:
    series = load_cases(args.cases)
    components = load_serial(args.serial)
    decision, _, _, _ = _decide(args, series, components)
    body = decision.to_dict()
    body["metadata"] = metadata("decide", args.seed, _effective(args))
    _emit(args.out, dump_json(body))
    return EXIT_OK


def cmd_estimate(args) -> int:
    if args.force_me and args.force_smooth:
        raise UsageError("--force-me and --force-smooth are mutually exclusive")
    series = load_cases(args.cases)
    components = load_serial(args.serial)
    out = Path(args.out)
    meta = metadata("estimate", args.seed, _effective(args))
    decision = None
    if args.force_smooth:
        det = None
        spec, draws, summ = _fit(series.with_counts(smooth_cases(series.counts, args.window)),
                                 components, None, args)
        approach = CASE_SMOOTHING
    elif args.force_me:
        rep, center, det = _detection(args, series)
        spec, draws, summ = _fit(series, components, rep, args,
                                 center if args.prior == "informative" else None)
        approach = MEASUREMENT_ERROR
    else:
        decision, det, me, sm = _decide(args, series, components)
        approach = decision.choice
        spec, draws, summ = me if approach == MEASUREMENT_ERROR else sm

    rt = summ["rt"]
    rows = [(t + 1, _fmt(rt["mean"][t]), _fmt(rt["lo"][t]), _fmt(rt["hi"][t])) for t in range(series.n)]
    write_text(out / "rt_summary.csv", csv_text(["t", "rt_mean", "rt_lo", "rt_hi"], rows, meta))
    plot_rows = [(t + 1, series.dates[t].isoformat(), approach, _fmt(rt["mean"][t]),
                  _fmt(rt["lo"][t]), _fmt(rt["hi"][t])) for t in range(series.n)]
    write_text(out / "rt_plot.csv", csv_text(["t", "date", "approach", "estimate", "lower", "upper"],
                                             plot_rows, meta))
    max_rhat = summ["max_rhat"]
    write_text(out / "params.json", dump_json({
        "metadata": meta,
        "approach": approach,
        "model": spec.describe(),
        "params": summ["params"],
        "wstar_mean": summ["wstar_mean"],
    }))
    write_text(out / "diagnostics.json", dump_json({
        "metadata": meta,
        "acceptance": draws.metadata["acceptance"],
        "rhat": {k: v["rhat"] for k, v in summ["params"].items()},
        "max_rhat": max_rhat,
        "converged": bool(max_rhat <= RHAT_LIMIT),
        "config_hash": draws.metadata["config_hash"],
    }))
    if det is not None:
        write_text(out / "detection.json", dump_json({**det, "metadata": meta}))
    if decision is not None:
        write_text(out / "decision.json", dump_json({**decision.to_dict(), "metadata": meta}))
    if not max_rhat <= RHAT_LIMIT:
        print(f"warning: max R-hat {max_rhat:.3f} exceeds {RHAT_LIMIT}", file=sys.stderr)
        return EXIT_RHAT
    return EXIT_OK


def cmd_evaluate(args) -> int:
    truth = read_csv_rows(Path(args.truth))
    est = read_csv_rows(Path(args.est))
    if len(truth) != len(est):
        raise ValidationError("truth and estimate files cover different days")
    try:
        r_true = [float(r["rt"]) for r in truth]
        r_hat = [float(r["rt_mean"]) for r in est]
        lo = [float(r["rt_lo"]) for r in est]
        hi = [float(r["rt_hi"]) for r in est]
    except KeyError as exc:
        raise ValidationError(f"missing column {exc}") from None
    m = scaled_errors(r_hat, r_true, lo, hi, skip_first=args.skip)
    body = {"MSE": m["mse"], "Bias": m["bias_pct"], "Cov. Prob.": m["coverage_pct"], "n_days": m["n_days"]}
    if args.clusters and args.manifest:
        est_c = json.loads(_read(args.clusters))["clusters"]
        true_rep = json.loads(_read(args.manifest)).get("reporting")
        true_c = true_rep["clusters"] if true_rep else {d: 1 for d in est_c}
        days = sorted(est_c)
        body["WFM"] = wfm([true_c[d] for d in days], [est_c[d] for d in days])
    body["metadata"] = metadata("evaluate", None, _effective(args))
    _emit(args.out, dump_json(body))
    if args.csv:
        keys = [k for k in ("MSE", "Bias", "Cov. Prob.", "WFM") if k in body]
        write_text(Path(args.csv), csv_text(keys, [[_fmt(body[k]) for k in keys]], body["metadata"]))
    return EXIT_OK


def _emit(out, text: str) -> None:
    if out:
        write_text(Path(out), text)
    else:
        sys.stdout.write(text)


def _effective(args) -> dict:
    skip = {"func", "config", "out", "csv", "workers"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _mcmc_flags(p):
    p.add_argument("--chains", type=int, default=8)
    p.add_argument("--iters", type=int, default=4000, help="total iterations per chain")
    p.add_argument("--burnin", type=int, default=2000)
    p.add_argument("--thin", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1, help="threads running chains in parallel")
    p.add_argument("--ar-order", type=int, default=2)
    p.add_argument("--window", type=int, default=7, help="case smoothing window (odd)")
    p.add_argument("--proxy-window", type=int, default=7, help="rolling proxy window for detection")
    p.add_argument("--prior", choices=("informative", "uniform"), default="informative",
                   help="theta prior centred on detected coefficients or flat")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rtme", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"rtme {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="simulate replicate outbreaks")
    p.add_argument("--config")
    p.add_argument("--tp", type=int, default=1)
    p.add_argument("--ds", default="DS0")
    p.add_argument("--days", type=int, default=50)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seed-cases", type=int, default=50)
    p.add_argument("--sigma-r", type=float, default=0.05)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("detect", help="detect day-of-week reporting clusters")
    p.add_argument("--config")
    p.add_argument("--cases", required=True)
    p.add_argument("--proxy-window", type=int, default=7)
    p.add_argument("--out")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("decide", help="choose measurement-error model or case smoothing")
    p.add_argument("--config")
    p.add_argument("--cases", required=True)
    p.add_argument("--serial", nargs="+", required=True)
    p.add_argument("--detection")
    p.add_argument("--out")
    _mcmc_flags(p)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("estimate", help="estimate R_t")
    p.add_argument("--config")
    p.add_argument("--cases", required=True)
    p.add_argument("--serial", nargs="+", required=True)
    p.add_argument("--detection", help="reporting clusters JSON; skips detection")
    p.add_argument("--force-me", action="store_true")
    p.add_argument("--force-smooth", action="store_true")
    p.add_argument("--out", required=True)
    _mcmc_flags(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("evaluate", help="score an R_t estimate against the truth")
    p.add_argument("--config")
    p.add_argument("--truth", required=True)
    p.add_argument("--est", required=True)
    p.add_argument("--skip", type=int, default=7)
    p.add_argument("--clusters", help="detection JSON to score with WFM")
    p.add_argument("--manifest", help="replicate manifest holding the true clusters")
    p.add_argument("--out")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_evaluate)
    return parser


def _config_path(argv) -> str | None:
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def parse_args(argv) -> argparse.Namespace:
    """Parse flags; values from ``--config`` JSON fill in anything not given on the command line."""
    argv = list(argv)
    parser = build_parser()
    path = _config_path(argv)
    command = next((tok for tok in argv if not tok.startswith("-")), None)
    choices = parser._subparsers._group_actions[0].choices
    if path is not None and command in choices:
        cfg = json.loads(_read(path))
        if not isinstance(cfg, dict):
            raise UsageError("--config must hold a JSON object")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        sub = choices[command]
        known = {a.dest for a in sub._actions}
        unknown = set(cfg) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        sub.set_defaults(**cfg)
        for action in sub._actions:
            if action.dest in cfg:
                action.required = False
    return parser.parse_args(argv)


def main(argv=None) -> int:
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
        return args.func(args)
    except UsageError as exc:
        print(f"rtme: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"rtme: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except json.JSONDecodeError as exc:
        print(f"rtme: invalid JSON: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"rtme: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
