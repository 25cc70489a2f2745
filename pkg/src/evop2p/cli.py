"""Command-line entry point: multi-seed experiments and reports.

Subcommands:

    run       execute runs x fitness-variants simulations, write per-run
              trace CSVs, per-variant averaged traces, a statistical
              report comparing variants at final time, and figures
    settling  sweep the adaptation period and report the settling time of
              the averaged global hit-ratio curve per variant

Scenario parameters come from a flat key=value config file; unknown keys
are rejected outright so a typo cannot silently fall back to a default.
"""

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import plots, stats
from .engine import RunTrace, ScenarioConfig, run, write_trace

__all__ = ["ExperimentSpec", "load_config", "cmd_run", "cmd_settling",
           "main"]

# config-file key -> ScenarioConfig field
CONFIG_KEYS = {
    "nodes": ("n_nodes", int),
    "n0": ("n0", int),
    "m": ("m", int),
    "duration": ("duration", float),
    "churn_rate": ("churn_rate", float),
    "query_rate": ("query_rate", float),
    "load_profile": ("load_profile", str),
    "load_switch_time": ("load_switch_time", float),
    "mix": ("mix", float),
    "sample_period": ("sample_period", float),
    "adapt_period": ("adapt_period", float),
    "fitness": ("fitness_kind", str),
    "phi0": ("phi0", float),
    "phi1": ("phi1", float),
    "phi2": ("phi2", float),
    "beta": ("beta", float),
    "delta": ("delta", float),
    "alphabet": ("alphabet", int),
    "model_window": ("model_window", int),
    "qhr_window": ("qhr_window", int),
    "hop_latency": ("hop_latency", float),
    "query_timeout": ("query_timeout", float),
    "release_mean": ("release_mean", float),
    "dup_expiry": ("dup_expiry", float),
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentSpec:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    variants: tuple = ("F2", "F4")
    runs: int = 25
    base_seed: int = 1
    outdir: Path = Path("out")
    jobs: int = 1
    make_plots: bool = True

    def validate(self):
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if not self.variants:
            raise ConfigError("at least one fitness variant required")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        self.scenario.validate()


def load_config(path) -> ScenarioConfig:
    """Parse a flat key=value file; '#' starts a comment, unknown keys fail."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in CONFIG_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            name, cast = CONFIG_KEYS[key]
            try:
                values[name] = cast(value)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: "
                                  f"{exc}") from None
    cfg = ScenarioConfig(**values)
    try:
        cfg.validate()
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return cfg


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return format(value, ".6g")


def _run_one(cfg: ScenarioConfig) -> RunTrace:
    return run(cfg)


def _execute(configs, jobs: int):
    """Run every config, preserving order; fan out to processes if asked."""
    if jobs <= 1 or len(configs) <= 1:
        return [_run_one(cfg) for cfg in configs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, configs))


def _averaged_rows(traces):
    """Pointwise cross-run mean/std of every trace column except t.

    Returns a list of dicts keyed "t", "<column>_avg", "<column>_std".
    """
    from .engine import TRACE_COLUMNS

    n = len(traces)
    length = len(traces[0].samples)
    for tr in traces:
        if len(tr.samples) != length:
            raise RuntimeError("traces with mismatched sample counts")
    rows = []
    for i in range(length):
        row = {"t": traces[0].samples[i].t}
        for col_idx, col in enumerate(TRACE_COLUMNS):
            if col == "t":
                continue
            vals = [tr.samples[i][col_idx] for tr in traces]
            mean = sum(vals) / n
            var = sum((v - mean) ** 2 for v in vals) / n
            row[f"{col}_avg"] = mean
            row[f"{col}_std"] = math.sqrt(var) if var > 0 else 0.0
        rows.append(row)
    return rows


def _avg_header():
    from .engine import TRACE_COLUMNS

    cols = ["t"]
    for col in TRACE_COLUMNS:
        if col != "t":
            cols.append(f"{col}_avg")
            cols.append(f"{col}_std")
    return cols


def _write_avg(rows, path):
    cols = _avg_header()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[c]) for c in cols) + "\n")


def _write_report(rows, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(stats.REPORT_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(row[0:1] + tuple(_fmt(v) for v in row[1:]))
                     + "\n")


def run_experiment(spec: ExperimentSpec):
    """Library form of the `run` subcommand; returns traces per variant."""
    spec.validate()
    outdir = Path(spec.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    seeds = [spec.base_seed + i for i in range(spec.runs)]
    configs = []
    for variant in spec.variants:
        for seed in seeds:
            configs.append(replace(spec.scenario, fitness_kind=variant,
                                   seed=seed))
    traces = _execute(configs, spec.jobs)
    by_variant = {}
    avg_by_variant = {}
    idx = 0
    for variant in spec.variants:
        vtraces = traces[idx:idx + spec.runs]
        idx += spec.runs
        by_variant[variant] = vtraces
        for seed, trace in zip(seeds, vtraces):
            write_trace(trace, outdir / f"{variant}_seed{seed}.csv")
        avg = _averaged_rows(vtraces)
        avg_by_variant[variant] = avg
        _write_avg(avg, outdir / f"{variant}_avg.csv")

    report_rows = []
    names = list(spec.variants)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            tag = "" if len(names) == 2 else f"[{a}_vs_{b}]"
            finals_a = [tr.samples[-1] for tr in by_variant[a]]
            finals_b = [tr.samples[-1] for tr in by_variant[b]]
            if len(finals_a) >= 2:
                report_rows.append(stats.report_row(
                    f"avg_global_qhr{tag}",
                    [s.qhr_mean for s in finals_a],
                    [s.qhr_mean for s in finals_b]))
                report_rows.append(stats.report_row(
                    f"std_global_qhr{tag}",
                    [s.qhr_std for s in finals_a],
                    [s.qhr_std for s in finals_b]))
    if report_rows:
        _write_report(report_rows, outdir / "report.csv")

    if spec.make_plots:
        for variant, avg in avg_by_variant.items():
            plots.plot_gene_traces(avg, variant,
                                   outdir / f"{variant}_genes.png")
            plots.plot_qhr(avg, variant, outdir / f"{variant}_qhr.png")
            plots.plot_measures(avg, variant,
                                outdir / f"{variant}_measures.png")
        if len(avg_by_variant) > 1:
            plots.plot_qhr_comparison(avg_by_variant,
                                      outdir / "qhr_comparison.png")
    return by_variant


def settling_experiment(spec: ExperimentSpec, ta_values):
    """Library form of the `settling` subcommand.

    For every (variant, Ta) the static-load scenario is run over the
    matched seeds; the settling time of the cross-run averaged global QHR
    series goes into settling.csv, the per-seed settling times into
    settling_seeds.csv.  Returns (rows, seed_rows).
    """
    spec.validate()
    if not ta_values:
        raise ConfigError("at least one Ta value required")
    outdir = Path(spec.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    seeds = [spec.base_seed + i for i in range(spec.runs)]
    base = replace(spec.scenario, load_profile="static")
    configs = []
    for variant in spec.variants:
        for ta in ta_values:
            for seed in seeds:
                configs.append(replace(base, fitness_kind=variant,
                                       adapt_period=ta, seed=seed))
    traces = _execute(configs, spec.jobs)
    rows = []
    seed_rows = []
    idx = 0
    for variant in spec.variants:
        for ta in ta_values:
            vtraces = traces[idx:idx + spec.runs]
            idx += spec.runs
            for seed, trace in zip(seeds, vtraces):
                seed_rows.append((variant, ta, seed,
                                  stats.settling_time(trace.series("qhr_mean"))))
            avg = _averaged_rows(vtraces)
            series = [(row["t"], row["qhr_mean_avg"]) for row in avg]
            rows.append((variant, ta, stats.settling_time(series)))
    with open(outdir / "settling.csv", "w", encoding="utf-8") as fh:
        fh.write("variant,ta,t_s\n")
        for variant, ta, ts in rows:
            fh.write(f"{variant},{_fmt(ta)},{_fmt(ts)}\n")
    with open(outdir / "settling_seeds.csv", "w", encoding="utf-8") as fh:
        fh.write("variant,ta,seed,t_s\n")
        for variant, ta, seed, ts in seed_rows:
            fh.write(f"{variant},{_fmt(ta)},{seed},{_fmt(ts)}\n")
    if spec.make_plots:
        plots.plot_settling(rows, outdir / "settling.png")
    return rows, seed_rows


def _spec_from_args(args) -> ExperimentSpec:
    scenario = load_config(args.config) if args.config else ScenarioConfig()
    variants = tuple(v.strip() for v in args.fitness.split(",")) \
        if args.fitness else (scenario.fitness_kind,)
    return ExperimentSpec(
        scenario=scenario,
        variants=variants,
        runs=args.runs,
        base_seed=args.seed,
        outdir=Path(args.out),
        jobs=args.jobs,
        make_plots=not args.no_plots,
    )


def _add_common(parser):
    parser.add_argument("--config", help="key=value scenario file")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=1,
                        help="base seed; run i uses seed base+i")
    parser.add_argument("--fitness",
                        help="comma-separated fitness variants, e.g. F2,F4")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker processes for independent runs")
    parser.add_argument("--no-plots", action="store_true",
                        help="skip PNG rendering")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="evop2p",
        description="Adaptive P2P overlay simulator: multi-seed experiments "
                    "with CSV traces, statistical reports and figures.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="multi-seed experiment")
    _add_common(p_run)
    p_run.add_argument("--runs", type=int, default=25,
                       help="seeds per variant (default 25)")

    p_set = sub.add_parser("settling", help="settling time vs Ta sweep")
    _add_common(p_set)
    p_set.add_argument("--runs", type=int, default=5,
                       help="seeds per (variant, Ta) (default 5)")
    p_set.add_argument("--ta", required=True,
                       help="comma-separated adaptation periods, e.g. 3,7,15")

    args = parser.parse_args(argv)
    try:
        spec = _spec_from_args(args)
        if args.command == "run":
            run_experiment(spec)
        else:
            ta_values = [float(x) for x in args.ta.split(",")]
            settling_experiment(spec, ta_values)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
