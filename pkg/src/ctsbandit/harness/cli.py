"""Command line entry point.

    ctsbandit run --config F --output D [--reps R] [--horizon T] [--seed S]
                  [--timing] [--couple-streams] [--policies a,b] [--workers W]
    ctsbandit list-presets
    ctsbandit diagnose-concentration --config F [--reps R] [--horizon T] [--seed S]

``--config`` takes a YAML file or a bundled preset name. On failure the last
line on stderr is ``error: {"type": ..., "message": ...}`` and the exit code
is nonzero.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from .config import list_presets, load_config, preset_path
from .report import emit_csv
from .runner import diagnostic_concentration, run_experiment, timing_report

log = logging.getLogger("ctsbandit")


def _overrides(args) -> dict:
    return dict(repetitions=args.reps, horizon=args.horizon, master_seed=args.seed,
                workers=getattr(args, "workers", None))


def cmd_run(args) -> int:
    config = load_config(args.config).with_overrides(**_overrides(args))
    if args.timing:
        config = config.with_overrides(timing=True)
    if args.couple_streams:
        config = config.with_overrides(couple_streams=True)
    if args.policies:
        config = config.select_policies([p.strip() for p in args.policies.split(",") if p.strip()])
    out_dir = Path(args.output)
    results = []
    # run everything before writing anything: no partial outputs on failure
    for label, cfg in config.expand_sweep():
        start = time.perf_counter()
        result = run_experiment(cfg, label)
        log.info("%s: %d reps x %d rounds in %.1fs", label, cfg.repetitions, cfg.horizon,
                 time.perf_counter() - start)
        results.append((label, cfg, result))
    for label, cfg, result in results:
        path = emit_csv(result, out_dir / f"{label}.csv")
        print(f"wrote {path}")
        summary = {name: round(float(result.mean_curve(name)[-1]), 4) for name in result.policies}
        print(f"  final mean regret: {json.dumps(summary)}")
        if cfg.timing:
            report = timing_report(cfg, result)
            print(f"  mean select ms/round: {json.dumps({k: round(v, 4) for k, v in report.items()})}")
    return 0


def cmd_list_presets(args) -> int:
    import yaml

    for name in list_presets():
        data = yaml.safe_load(preset_path(name).read_text())
        print(f"{name:22s} {data.get('description', '')}")
    return 0


def cmd_diagnose(args) -> int:
    config = load_config(args.config).with_overrides(**_overrides(args))
    if config.sweep:
        config = config.expand_sweep()[0][1]
    report = diagnostic_concentration(config, radius_scale=args.radius_scale)
    print(json.dumps({"total": report.total, "runs": len(report.counts), "horizon": report.horizon,
                      "radius_scale": report.radius_scale, "counts": report.counts}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ctsbandit", description="Combinatorial semi-bandit benchmarks")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment and write CSV curves")
    run.add_argument("--config", required=True, help="YAML config file or preset name")
    run.add_argument("--output", required=True, help="output directory")
    run.add_argument("--reps", type=int)
    run.add_argument("--horizon", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--workers", type=int)
    run.add_argument("--timing", action="store_true")
    run.add_argument("--couple-streams", action="store_true")
    run.add_argument("--policies", help="comma-separated policy names to keep")
    run.set_defaults(func=cmd_run)

    lst = sub.add_parser("list-presets", help="list bundled experiment presets")
    lst.set_defaults(func=cmd_list_presets)

    diag = sub.add_parser("diagnose-concentration", help="count concentration-event rounds for CTS-Beta")
    diag.add_argument("--config", required=True)
    diag.add_argument("--reps", type=int)
    diag.add_argument("--horizon", type=int)
    diag.add_argument("--seed", type=int)
    diag.add_argument("--radius-scale", type=float, default=1.0)
    diag.set_defaults(func=cmd_diagnose)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - every failure becomes one machine-readable line
        print("error: " + json.dumps({"type": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
