"""Command-line entry point.

    simulate --preset fig2 --quick --out results/
    simulate --config myrun.cfg --seed 7 --jobs 4

Writes, per scenario: <name>.csv (per-replication and aggregated rows),
<name>_hops.csv (per-remaining-hop loss), <name>.svg (chart) and <name>.plot
(standalone gnuplot script).  Exit status is non-zero when any sweep cell
failed.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .errors import ConfigurationError
from .experiment import (
    PRESETS,
    RunResult,
    Scenario,
    apply_config,
    emit_csv,
    emit_hops_csv,
    emit_plot,
    preset,
    resolved_config_text,
    run_scenario,
    write_plot_script,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Discrete-event simulator of optical burst switching networks",
    )
    parser.add_argument("--config", help="configuration file (key = value with [section] headers)")
    parser.add_argument(
        "--preset",
        choices=sorted(PRESETS),
        help="built-in scenario; --config values are applied on top of it",
    )
    parser.add_argument("--seed", type=int, help="master seed override")
    parser.add_argument("--jobs", type=int, default=1, help="concurrent sweep cells (default 1)")
    parser.add_argument("--out", default=".", help="output directory (default: current)")
    parser.add_argument(
        "--quick",
        action="store_true",
        help="desk-scale statistics: 3 replications of 1e5 bursts per cell",
    )
    parser.add_argument(
        "--print-config",
        action="store_true",
        help="print the fully resolved scenario parameters and exit",
    )
    parser.add_argument("--quiet", action="store_true", help="suppress progress output")
    return parser


def _resolve_scenario(args) -> Scenario:
    if not args.preset and not args.config:
        raise ConfigurationError("either --preset or --config is required")
    scenario = preset(args.preset, quick=args.quick) if args.preset else None
    if args.config:
        scenario = apply_config(args.config, base=scenario)
        if args.quick:
            scenario = scenario.quickened()
    if args.seed is not None:
        scenario = replace(scenario, master_seed=args.seed)
    scenario.validate()
    return scenario


def _emit_outputs(scenario: Scenario, result: RunResult, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"{scenario.name}.csv")
    hops_path = os.path.join(out_dir, f"{scenario.name}_hops.csv")
    svg_path = os.path.join(out_dir, f"{scenario.name}.svg")
    script_path = os.path.join(out_dir, f"{scenario.name}.plot")
    emit_csv(result.rows, csv_path)
    if result.hops_rows:
        emit_hops_csv(result.hops_rows, hops_path)
    plot_rows = result.hops_rows if scenario.plot_kind == "fairness" else result.aggregate_rows()
    emit_plot(plot_rows, scenario.plot_kind, svg_path, scenario=scenario)
    write_plot_script(
        script_path,
        os.path.basename(csv_path),
        scenario.plot_kind,
        hops_csv_name=os.path.basename(hops_path) if result.hops_rows else None,
    )
    print(f"wrote {csv_path}, {hops_path}, {svg_path}, {script_path}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = _resolve_scenario(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    if args.print_config:
        print(resolved_config_text(scenario), end="")
        return 0
    progress = None if args.quiet else lambda msg: print(msg, file=sys.stderr)
    try:
        result = run_scenario(scenario, jobs=max(1, args.jobs), progress=progress)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    if not result.rows:
        print("no cell produced results", file=sys.stderr)
        return 1
    _emit_outputs(scenario, result, args.out)
    if result.failures:
        for cell, error in result.failures:
            print(
                f"cell failed: {cell['topology']}/{cell['arch']}/load={cell['load']}"
                f"/rep={cell['rep']}: {error}",
                file=sys.stderr,
            )
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
