"""Command-line entry point.

Subcommands:
  run       replicate one scenario, write CSV/txt results and a summary
  sweep     full 3x3x3 factorial with replications and a combined summary
  mspe      run-length analysis over candidate horizons
  validate  check a scenario file and echo the effective config
  serve     start the HTTP service

Every run writes an ``effective_config.json`` echo with all defaults and
overrides materialized, so outputs are self-describing.  Exit codes:
0 success, 2 configuration error (message names the offending field),
3 output I/O error.
"""

from __future__ import annotations

import argparse
import os
import statistics
import sys

from .config import ConfigError, ScenarioConfig, load_scenario
from .experiments import (
    ExportError,
    InsufficientReps,
    ScenarioResult,
    export,
    full_factorial,
    mspe_run_length,
    render_summary_csv,
    replicate,
    run_scenario,
    aggregate_outcomes,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3

DEFAULT_OUT_ENV = "CHAINSIM_OUT"


def _default_out() -> str:
    return os.environ.get(DEFAULT_OUT_ENV, "out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chainsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("scenario", help="scenario file (JSON)")
        p.add_argument("--out", default=None, help=f"output directory (default ${DEFAULT_OUT_ENV} or ./out)")
        p.add_argument("--seed", type=int, default=None, help="override the master seed")
        p.add_argument("--crn", action=argparse.BooleanOptionalAction, default=None,
                       help="align random streams across scenarios")
        p.add_argument("--format", choices=["csv", "txt"], default=None,
                       help="write only this result format (default: both)")
        p.add_argument("--warmup-days", type=int, default=None,
                       help="override statistics warm-up, in working days")
        p.add_argument("--intensity-mapping", choices=["inverse", "direct"], default=None,
                       help="how -/0/+ maps onto inter-arrival hours")
        p.add_argument("--jobs", type=int, default=1, help="parallel simulation processes")

    p_run = sub.add_parser("run", help="run one scenario with replications")
    add_common(p_run)

    p_sweep = sub.add_parser("sweep", help="run the full factorial sweep")
    add_common(p_sweep)

    p_mspe = sub.add_parser("mspe", help="run-length (pure error) analysis")
    add_common(p_mspe)
    p_mspe.add_argument("--lengths", default="130,260,390,520",
                        help="comma-separated candidate run lengths in working days")
    p_mspe.add_argument("--reps", type=int, default=3, help="replications per candidate length")

    p_val = sub.add_parser("validate", help="validate a scenario file")
    p_val.add_argument("scenario", help="scenario file (JSON)")

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--data-dir", default="chainsim-data")
    p_serve.add_argument("--jobs", type=int, default=2)
    return parser


def load_effective_config(args) -> ScenarioConfig:
    """Parse the scenario file and fold CLI overrides into one config."""
    config = load_scenario(args.scenario)
    data = config.to_dict()
    if args.seed is not None:
        data["master_seed"] = args.seed
    if args.crn is not None:
        data["crn"] = args.crn
    if getattr(args, "warmup_days", None) is not None:
        data["warmup_days"] = args.warmup_days
    if getattr(args, "intensity_mapping", None) is not None:
        data["intensity_mapping"] = args.intensity_mapping
    return ScenarioConfig.from_dict(data)


def _prepare_out(args, config: ScenarioConfig) -> str:
    out = args.out or _default_out()
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "effective_config.json"), "w", encoding="utf-8") as fh:
        fh.write(config.to_json())
    return out


def _write_results(results: list[ScenarioResult], out: str, fmt: str | None) -> None:
    formats = [fmt] if fmt else ["csv", "txt"]
    for f in formats:
        export(results, f, os.path.join(out, f"results.{f}"))


def _print_node_summary(result: ScenarioResult) -> None:
    print(f"scenario {result.scenario_id} ({len(result.outcomes)} replications)")
    print(f"{'node':<12}{'fill rate (orders)':>20}{'fill rate (quantity)':>22}{'avg on hand':>14}")
    for node_id in sorted(result.aggregates):
        m = result.aggregates[node_id]
        fo, fo_std = m["fill_rate_orders"]
        fq, _ = m["fill_rate_quantity"]
        oh, _ = m["avg_on_hand"]
        print(f"{node_id:<12}{fo:>14.4f} ±{fo_std:<5.3f}{fq:>16.4f}{oh:>17.1f}")
    if result.degenerate_std:
        print("note: single replication or zero spread; std is not meaningful")


def cmd_run(args) -> int:
    config = load_effective_config(args)
    out = _prepare_out(args, config)
    result = replicate(config)
    _write_results([result], out, args.format)
    _print_node_summary(result)
    return EXIT_OK


def cmd_sweep(args) -> int:
    base = load_effective_config(args)
    out = _prepare_out(args, base)
    configs = full_factorial(base)
    results: list[ScenarioResult] = []
    try:
        if args.jobs > 1:
            from .experiments import run_sweep

            results = run_sweep(base, jobs=args.jobs)
        else:
            for cfg in configs:
                outcomes = [run_scenario(cfg, rep) for rep in range(base.replications)]
                results.append(aggregate_outcomes(cfg, outcomes))
                print(f"{cfg.name}: done ({base.replications} reps)")
    except KeyboardInterrupt:
        _write_partial(results, out, args.format)
        print(f"interrupted after {len(results)} of {len(configs)} scenarios; "
              f"partial outputs marked in {out}", file=sys.stderr)
        return 1
    except Exception as exc:
        _write_partial(results, out, args.format)
        print(f"sweep failed after {len(results)} of {len(configs)} scenarios: {exc}; "
              f"partial outputs marked in {out}", file=sys.stderr)
        return 1
    _write_results(results, out, args.format)
    with open(os.path.join(out, "sweep_summary.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write(render_summary_csv(results))
    rows = sum(len(r.outcomes) for r in results)
    print(f"sweep complete: {len(results)} scenarios x {base.replications} reps = {rows} runs")
    return EXIT_OK


def _write_partial(results: list[ScenarioResult], out: str, fmt: str | None) -> None:
    if not results:
        return
    formats = [fmt] if fmt else ["csv", "txt"]
    for f in formats:
        export(results, f, os.path.join(out, f"results_PARTIAL.{f}"))
    with open(os.path.join(out, "sweep_summary_PARTIAL.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write(render_summary_csv(results))


def cmd_mspe(args) -> int:
    config = load_effective_config(args)
    out = _prepare_out(args, config)
    lengths = [int(x) for x in args.lengths.split(",") if x.strip()]
    analysis = mspe_run_length(config, lengths, args.reps)
    path = os.path.join(out, "mspe_curve.csv")
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("run_length_days,mspe,chosen\n")
            for length, value in zip(analysis.lengths, analysis.curve):
                fh.write(f"{length},{value:.10g},{int(length == analysis.chosen_length)}\n")
    except OSError as exc:
        raise ExportError(str(exc)) from exc
    print(f"candidates: {analysis.lengths}")
    print(f"mspe curve: {[f'{v:.3e}' for v in analysis.curve]}")
    print(f"chosen run length: {analysis.chosen_length} working days")
    return EXIT_OK


def cmd_validate(args) -> int:
    config = load_scenario(args.scenario)
    sys.stdout.write(config.to_json())
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=args.data_dir, jobs=args.jobs)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    commands = {
        "run": cmd_run,
        "sweep": cmd_sweep,
        "mspe": cmd_mspe,
        "validate": cmd_validate,
        "serve": cmd_serve,
    }
    try:
        return commands[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InsufficientReps as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ExportError, OSError) as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
