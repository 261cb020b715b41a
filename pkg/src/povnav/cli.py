"""Command line entry point: run, bench, ablate, render."""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
from dataclasses import replace

from .core import Pose2D
from .harness.builtin import BENCH_PROFILE, BUILTIN, builtin_suite
from .harness.environments import KINDS, ConfigError, EnvironmentSpec, Task, build_environment
from .harness.episode import EpisodeConfig, run_episode
from .harness.frames import FrameWriter
from .harness.planner import Mode
from .harness.suite import (
    SuiteError,
    aggregate,
    camera_from,
    load_suite,
    parse_resolution,
    parse_seeds,
    planner_params_from,
    run_suite,
    write_report,
)
from .pathgen import PathContractError
from .simworld import WorldFileError, load_world

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONTRACT = 3


def _floats(text: str, n: int, what: str) -> tuple[float, ...]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != n:
        raise argparse.ArgumentTypeError(f"{what} needs {n} comma-separated numbers")
    return tuple(float(p) for p in parts)


def _episode_setup(args):
    """World, task and EpisodeConfig from the run/render flags plus an optional config file."""
    planner_sec, camera_sec = {}, {}
    if args.bench_profile:
        cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        cp.read_string(BENCH_PROFILE)
        planner_sec.update(cp["planner"])
        camera_sec.update(cp["camera"])
    if args.config:
        cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
        if not cp.read(args.config, encoding="utf-8"):
            raise FileNotFoundError(args.config)
        unknown = set(cp.sections()) - {"planner", "camera"}
        if unknown:
            raise SuiteError(f"unknown section(s) {sorted(unknown)}; run configs take [planner] and [camera]", args.config)
        planner_sec.update(cp["planner"] if cp.has_section("planner") else {})
        camera_sec.update(cp["camera"] if cp.has_section("camera") else {})
    dims = parse_resolution(args.resolution)
    params = planner_params_from(planner_sec)
    camera = camera_from(camera_sec, dims)

    if args.world:
        world = load_world(args.world)
        if args.start is None or args.goal is None:
            raise SuiteError("--world needs --start and --goal", args.world)
        task = Task(Pose2D(*args.start), tuple(args.goal))
    else:
        spec = EnvironmentSpec(
            kind=args.env, spacing_m=args.spacing, pedestrians=args.pedestrians, seed=args.seed
        )
        world, task = build_environment(spec)
        if args.start is not None:
            task = replace(task, start=Pose2D(*args.start))
        if args.goal is not None:
            task = replace(task, goal=tuple(args.goal))
    config = EpisodeConfig(task.start, task.goal, Mode(args.mode), args.epsilon, args.t_max, params, dims, camera)
    return world, task, config


def _add_episode_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--env", choices=KINDS, default="free")
    p.add_argument("--spacing", type=float, default=3.0, help="grid_field surface gap, m")
    p.add_argument("--pedestrians", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--world", help="world file (overrides --env)")
    p.add_argument("--start", type=lambda s: _floats(s, 3, "--start"), help="x,y,theta")
    p.add_argument("--goal", type=lambda s: _floats(s, 2, "--goal"), help="x,y")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="full")
    p.add_argument("--resolution", default="320x240")
    p.add_argument("--t-max", type=float, default=90.0)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--config", help="INI file with [planner] and [camera] sections")
    p.add_argument("--bench-profile", action="store_true", help="use the benchmark planner/camera profile")


def cmd_run(args) -> int:
    world, task, config = _episode_setup(args)
    res = run_episode(world, config)
    summary = {
        "outcome": res.outcome,
        "success": res.success,
        "path_length_m": round(res.path_length_m, 4),
        "straight_line_m": round(task.distance, 4),
        "duration_s": round(res.duration_s, 3),
        "final_distance_m": round(res.final_distance_m, 4),
        "mean_latency_ms": round(res.mean_latency_s * 1000, 3),
        "max_latency_ms": round(res.max_latency_s * 1000, 3),
    }
    print(json.dumps(summary) if args.json else " ".join(f"{k}={v}" for k, v in summary.items()))
    return EXIT_OK


def _print_aggregates(records, stream) -> None:
    for a in aggregate(records):
        print(
            f"{a.scenario:>12} {a.mode.value:>8}  n={a.n:3d}  success={a.success_rate:6.1%}  "
            f"mean_path={a.mean_path_length_m:7.2f} m  p50={a.latency_ms[0]:6.2f} ms",
            file=stream,
        )


def _write_csv(records, name: str, out: str | None) -> None:
    if out in (None, "-"):
        write_report(records, name, sys.stdout)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            write_report(records, name, fh)


def cmd_bench(args) -> int:
    suite = load_suite(args.suite)
    if args.seeds:
        suite = replace(suite, seeds=parse_seeds(args.seeds))
    records = run_suite(suite, workers=args.workers)
    _write_csv(records, suite.name, args.output)
    _print_aggregates(records, sys.stderr)
    return EXIT_OK


def cmd_ablate(args) -> int:
    suite = builtin_suite(args.suite)
    if args.seeds:
        suite = replace(suite, seeds=parse_seeds(args.seeds))
    records = run_suite(suite, workers=args.workers)
    _write_csv(records, suite.name, args.output)
    _print_aggregates(records, sys.stderr)
    return EXIT_OK


def cmd_render(args) -> int:
    world, task, config = _episode_setup(args)
    if args.frames is not None:
        config = replace(config, t_max=min(config.t_max, args.frames * config.control_dt))
    writer = FrameWriter(args.out, every=args.every)
    res = run_episode(world, config, frame_hook=writer)
    print(f"wrote {len(writer.written)} frames to {args.out} (outcome={res.outcome})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="povnav", description="Image-space navigation planner and simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a single closed-loop episode")
    _add_episode_flags(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="run a suite file and write a CSV report")
    p.add_argument("suite")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--workers", type=int)
    p.add_argument("--seeds", help="override the suite seeds, e.g. 0-4")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("ablate", help="run a built-in suite (default: the ablation study)")
    p.add_argument("--suite", choices=sorted(BUILTIN), default="ablation")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--workers", type=int)
    p.add_argument("--seeds", help="override the suite seeds, e.g. 0-4")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("render", help="run an episode and dump annotated PPM frames")
    _add_episode_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--every", type=int, default=1)
    p.add_argument("--frames", type=int, help="stop after this many control frames")
    p.set_defaults(func=cmd_render)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SuiteError, ConfigError, WorldFileError, OSError) as exc:
        print(f"povnav: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PathContractError, ValueError, KeyError) as exc:
        print(f"povnav: contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
