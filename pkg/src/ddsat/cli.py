"""Command line front end: `ddsat run | sweep-nodes | sweep-sensing`.

Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
DDSAT_SEED overrides the scenario's default seed when --seed is absent.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import experiments, metrics, report, sim
from .scenario import ParseError, ScenarioConfig, ValidationError, parse_scenario

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _resolve_seed(args_seed: int | None, cfg: ScenarioConfig | None = None) -> int:
    if args_seed is not None:
        return args_seed
    env = os.environ.get("DDSAT_SEED")
    if env is not None:
        return int(env)
    return cfg.seed if cfg is not None else 0


def _load_scenario(path: str) -> ScenarioConfig:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"scenario file not found: {p}")
    return parse_scenario(p.read_text())


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _load_scenario(args.scenario)
    seed = _resolve_seed(args.seed, cfg)
    frames = args.frames if args.frames is not None else cfg.frames
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result = sim.run(cfg, seed=seed, frames=frames)
    metrics.write_csv(metrics.render_frames_csv(result.log), out / "frames.csv")
    metrics.write_csv(
        metrics.render_summary_csv(result.log, warmup=args.warmup),
        out / "summary.csv")
    (out / "trace.txt").write_text("\n".join(result.trace) + "\n")
    if not args.no_plot:
        report.plot_run(result.log, out)
    print(f"wrote frames.csv, summary.csv, trace.txt to {out}")
    return EXIT_OK


def cmd_sweep_nodes(args: argparse.Namespace) -> int:
    if not 1 <= args.min <= args.max:
        print("error: need 1 <= --min <= --max", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seed = _resolve_seed(args.seed)
    points = experiments.sweep_nodes(
        args.min, args.max, frames=args.frames, seeds=args.seeds,
        base_seed=seed, warmup=args.warmup)
    meta = f"seed={seed} seeds_per_point={args.seeds} frames={args.frames}"
    metrics.write_csv(
        metrics.render_sweep_csv(experiments.sweep_rows(points), meta),
        out / "sweep.csv")
    if not args.no_plot:
        report.plot_node_sweep(points, out)
    print(f"wrote sweep.csv to {out}")
    return EXIT_OK


def cmd_sweep_sensing(args: argparse.Namespace) -> int:
    counts = [int(v) for v in args.nodes.split(",") if v.strip()]
    if not counts or any(c < 1 for c in counts):
        print("error: --nodes must be a comma list of counts >= 1",
              file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seed = _resolve_seed(args.seed)
    points = experiments.sweep_sensing(
        counts, sigma_db=args.sigma, trials=args.trials, seed=seed,
        threshold_dbm=args.threshold, primary_power_dbm=args.primary_power,
        noise_floor_dbm=args.noise_floor)
    meta = (f"seed={seed} sigma={args.sigma:g} trials={args.trials} "
            f"threshold={args.threshold:g}")
    metrics.write_csv(
        metrics.render_sweep_csv(experiments.sweep_rows(points), meta),
        out / "sweep.csv")
    if not args.no_plot:
        report.plot_sensing_sweep(points, out)
    print(f"wrote sweep.csv to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddsat",
        description="DDSAT cognitive-radio MAC simulator and experiment harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario file")
    p_run.add_argument("--scenario", required=True)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--frames", type=int, default=None)
    p_run.add_argument("--warmup", type=int, default=metrics.DEFAULT_WARMUP_FRAMES)
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--no-plot", action="store_true")
    p_run.set_defaults(func=cmd_run)

    p_nodes = sub.add_parser("sweep-nodes",
                             help="throughput/fairness vs network size")
    p_nodes.add_argument("--min", type=int, default=1)
    p_nodes.add_argument("--max", type=int, default=4)
    p_nodes.add_argument("--frames", type=int, default=300)
    p_nodes.add_argument("--seeds", type=int, default=5)
    p_nodes.add_argument("--seed", type=int, default=None)
    p_nodes.add_argument("--warmup", type=int, default=metrics.DEFAULT_WARMUP_FRAMES)
    p_nodes.add_argument("--out", required=True)
    p_nodes.add_argument("--no-plot", action="store_true")
    p_nodes.set_defaults(func=cmd_sweep_nodes)

    p_sense = sub.add_parser("sweep-sensing",
                             help="fused sensing accuracy vs cooperators")
    p_sense.add_argument("--nodes", default="1,3,5")
    p_sense.add_argument("--sigma", type=float, required=True)
    p_sense.add_argument("--trials", type=int, default=10_000)
    p_sense.add_argument("--threshold", type=float, default=-60.0)
    p_sense.add_argument("--primary-power", type=float, default=-50.0)
    p_sense.add_argument("--noise-floor", type=float, default=-90.0)
    p_sense.add_argument("--seed", type=int, default=None)
    p_sense.add_argument("--out", required=True)
    p_sense.add_argument("--no-plot", action="store_true")
    p_sense.set_defaults(func=cmd_sweep_sensing)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError, FileNotFoundError,
            sim.InvalidScenario) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
