"""Command-line front end: ``tdswt {simulate,magnus,verify-swt,params}``.

Exit codes: 0 success, 1 a verification check failed, 2 invalid config or
arguments, 3 the propagator did not converge.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import checks, config as cfg, fidelity, magnus
from .dispersive import ModelVariant, extract_reduced_entries
from .errors import ConvergenceWarning, DispersiveValidityWarning
from .propagator import CONVERGENCE_WARN, evolve_reduced
from .pulses import sample

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_CONVERGENCE = 0, 1, 2, 3
HIST_NAMES = {ModelVariant.NO_SDOT: "hist_dF12.csv", ModelVariant.CONSTANT_MEAN: "hist_dF13.csv"}


def _fmt(x) -> str:
    return format(float(x) + 0.0, ".17g")   # + 0.0 folds -0 into 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML experiment config (defaults if omitted)")
    common.add_argument("--pulse", choices=["sin", "tan"], help="select the pulse shape")
    common.add_argument("--variant", choices=[v.value for v in ModelVariant],
                        help="restrict output to one model variant")
    common.add_argument("--ns", type=int, help="number of random targets")
    common.add_argument("--tg", type=float, help="gate time in ns")
    common.add_argument("--seed", type=int, help="RNG seed for the target angles")
    common.add_argument("--threads", type=int, help="worker threads for the target loop")
    common.add_argument("--out", type=Path, help="output directory")

    parser = argparse.ArgumentParser(
        prog="tdswt", description="Dispersive-frame models of flux-pulsed transmon gates.",
        epilog="exit codes: 0 ok, 1 check failed, 2 bad config or arguments, 3 no convergence")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common],
                   help="evolve U1/U2/U3 and score them against random targets")
    sub.add_parser("magnus", parents=[common],
                   help="second-order Magnus summary and analytic error histogram")
    sub.add_parser("verify-swt", parents=[common],
                   help="residual scaling and generator consistency checks")
    p = sub.add_parser("params", parents=[common], help="dump the sampled control trace")
    p.add_argument("--defaults", action="store_true", help="print the default config and exit")
    return parser


def resolve_config(args) -> cfg.ExperimentConfig:
    conf = cfg.load(args.config) if args.config else cfg.default_config()
    if args.pulse:
        conf = conf.replace(pulse_kind=cfg.PULSE_ALIASES[args.pulse])
        if conf.pulse_kind not in conf.pulses:
            raise cfg.ConfigError(f"config has no {conf.pulse_kind} pulse block")
    if args.tg is not None:
        if args.tg <= 0:
            raise cfg.ConfigError("--tg must be positive")
        conf = conf.with_gate_time(args.tg)
    if args.variant:
        conf = conf.replace(variants=(ModelVariant.parse(args.variant),))
    for flag, name, minimum in (("ns", "n_targets", 1), ("seed", "seed", 0),
                                ("threads", "threads", 1)):
        value = getattr(args, flag)
        if value is not None:
            if value < minimum:
                raise cfg.ConfigError(f"--{flag} must be >= {minimum}")
            conf = conf.replace(**{name: value})
    if args.out is not None:
        conf = conf.replace(out=str(args.out))
    return conf


def _outdir(conf) -> Path:
    out = Path(conf.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _evolutions(conf):
    results = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        for v in ModelVariant:
            results[v] = evolve_reduced(conf.pulse, conf.device, v, conf.n_steps)
    return results


def cmd_simulate(conf) -> int:
    out = _outdir(conf)
    evolutions = _evolutions(conf)
    stats = fidelity.run_statistics(conf.pulse, conf.device, conf.n_targets, conf.seed,
                                    conf.n_steps, conf.threads, evolutions=evolutions)
    fidelity.write_records_csv(out / "records.csv", stats)
    for v in conf.variants:
        if v in HIST_NAMES:
            values = stats.dF12 if v is ModelVariant.NO_SDOT else stats.dF13
            fidelity.write_histogram_csv(out / HIST_NAMES[v], *fidelity.histogram(values))
    report = {
        v.value: {
            "U_real": evolutions[v].U_final.real.tolist(),
            "U_imag": evolutions[v].U_final.imag.tolist(),
            "unitarity_defect": evolutions[v].unitarity_defect,
            "convergence": evolutions[v].convergence,
        }
        for v in ModelVariant if v in conf.variants or v is ModelVariant.FULL
    }
    with open(out / "unitaries.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    worst = max(r.convergence for r in evolutions.values())
    if worst > CONVERGENCE_WARN:
        print(f"error: propagator changed by {worst:.3e} on step doubling; raise n_steps",
              file=sys.stderr)
        return EXIT_CONVERGENCE
    print(f"wrote {out / 'records.csv'} ({len(stats)} targets); "
          f"median |dF12| = {np.median(np.abs(stats.dF12)):.3e}, "
          f"median |dF13| = {np.median(np.abs(stats.dF13)):.3e}")
    return EXIT_OK


def cmd_magnus(conf) -> int:
    out = _outdir(conf)
    n = conf.n_steps if conf.n_steps % 2 == 0 else conf.n_steps + 1
    entries = extract_reduced_entries(sample(conf.pulse, n, conf.device))
    summary = magnus.summarize(entries)
    mean = magnus.mean_delta_f(summary)
    with open(out / "magnus_summary.json", "w", encoding="utf-8") as fh:
        fh.write(magnus.summary_json(summary, mean))
        fh.write("\n")
    angles = fidelity.sample_angles(conf.seed, conf.n_targets)
    df = magnus.analytic_delta_f(summary, angles)
    fidelity.write_histogram_csv(out / "hist_analytic_dF.csv", *fidelity.histogram(df))
    print(f"mean |dF| = {mean:.3e} (log10 {np.log10(mean):.2f}), k1 = {summary.k1:.4g}, "
          f"k2 = {summary.k2:.4g}")
    return EXIT_OK


def cmd_verify(conf) -> int:
    out = _outdir(conf)
    results = checks.swt_suite(conf.device)
    text = "\n".join(r.line() for r in results) + "\n"
    (out / "verify_swt.txt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK


def trace_columns(trace):
    """Column names and a (T, columns) array for a control trace."""
    names, cols = ["t"], [trace.times]
    for m in range(trace.n_systems):
        q = m + 1
        names += [f"phi_{q}", f"phidot_{q}"]
        cols += [trace.flux[:, m], trace.flux_dot[:, m]]
        for j in range(trace.levels - 1):
            for key, arr in (("delta", trace.delta), ("lambda", trace.lam),
                             ("lambda_dot", trace.lam_dot), ("chi", trace.chi)):
                names.append(f"{key}_{q}_{j}{j + 1}")
                cols.append(arr[:, m, j])
    return names, np.column_stack(cols)


def cmd_params(conf, defaults: bool) -> int:
    if defaults:
        sys.stdout.write(cfg.dumps(conf))
        return EXIT_OK
    out = _outdir(conf)
    trace = sample(conf.pulse, conf.n_steps, conf.device)
    names, data = trace_columns(trace)
    with open(out / "trace.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(names)
        for row in data:
            w.writerow([_fmt(x) for x in row])
    print(f"wrote {out / 'trace.csv'} ({len(data)} samples)")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        conf = resolve_config(args)
    except (cfg.ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    warnings.simplefilter("default", DispersiveValidityWarning)
    try:
        if args.command == "simulate":
            return cmd_simulate(conf)
        if args.command == "magnus":
            return cmd_magnus(conf)
        if args.command == "verify-swt":
            return cmd_verify(conf)
        return cmd_params(conf, args.defaults)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
