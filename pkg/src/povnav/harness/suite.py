"""Suite files, the (scenario x mode x seed) runner and the CSV report.

Suite and run-config files are INI files::

    [suite]
    name = ablation
    modes = pog_only, pog_hog, full
    seeds = 0-19            ; ranges and comma lists
    resolution = 320x240
    t_max = 90
    workers = 1

    [planner]               ; optional, any PlannerParams field
    safety_margin_m = 0.3

    [camera]                ; optional
    focal_px_640 = 200      ; focal length at 640 px width, scaled to the resolution
    height_m = 0.5

    [scenario field2]       ; one section per scenario
    kind = grid_field
    spacing_m = 2.0
"""

from __future__ import annotations

import configparser
import csv
import io
import math
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from ..core import CameraModel, ImageDims
from ..pathgen import RobotFootprint
from ..servo import ControlLimits
from ..subgoal import ObjectiveWeights
from .environments import ConfigError, EnvironmentSpec, build_environment
from .episode import EpisodeConfig, EpisodeResult, run_episode
from .planner import Mode, PlannerParams

CSV_SCHEMA_VERSION = 1
CSV_COLUMNS = [
    "schema_version", "row_type", "suite", "scenario", "mode", "seed",
    "outcome", "success", "collision", "timeout", "path_length_m", "straight_line_m", "duration_s",
    "mean_latency_ms", "max_latency_ms",
    "n_episodes", "success_rate", "mean_path_length_m", "latency_p50_ms", "latency_p90_ms", "latency_p99_ms",
]


class SuiteError(ValueError):
    """Parse or validation error, carrying the offending file and line when known."""

    def __init__(self, message: str, source: str = "<suite>", line: int | None = None):
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")
        self.source, self.line = source, line


@dataclass(frozen=True)
class Scenario:
    name: str
    env: EnvironmentSpec  # seed is replaced per episode


@dataclass(frozen=True)
class Suite:
    name: str
    scenarios: tuple[Scenario, ...]
    modes: tuple[Mode, ...]
    seeds: tuple[int, ...]
    dims: ImageDims = ImageDims(320, 240)
    params: PlannerParams = PlannerParams()
    camera: CameraModel | None = None
    t_max: float = 90.0
    epsilon: float = 0.5
    workers: int = 1

    @property
    def n_episodes(self) -> int:
        return len(self.scenarios) * len(self.modes) * len(self.seeds)


# ---- parsing -------------------------------------------------------------


def parse_seeds(text: str) -> tuple[int, ...]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        m = re.fullmatch(r"(-?\d+)\s*-\s*(-?\d+)", part)
        if m:
            a, b = int(m.group(1)), int(m.group(2))
            if b < a:
                raise ValueError(f"empty seed range {part!r}")
            out.extend(range(a, b + 1))
        else:
            out.append(int(part))
    if not out:
        raise ValueError("no seeds given")
    return tuple(out)


def parse_resolution(text: str) -> ImageDims:
    m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", text)
    if not m:
        raise ValueError(f"resolution must look like 640x480, got {text!r}")
    return ImageDims(int(m.group(1)), int(m.group(2))).validate()


_BOOL = {"1": True, "yes": True, "true": True, "on": True, "0": False, "no": False, "false": False, "off": False}


def _coerce(value: str, kind):
    if kind is bool:
        if value.lower() not in _BOOL:
            raise ValueError(f"expected a boolean, got {value!r}")
        return _BOOL[value.lower()]
    return kind(value)


_PLANNER_KEYS = {
    "w1": float, "w2": float, "k_v_480": float, "k_omega": float, "lambda_star_frac": float,
    "v_max": float, "omega_max": float, "dv_max": float, "domega_max": float,
    "half_width_m": float, "safety_margin_m": float, "d_max_frac": float, "cruise_speed": float,
    "postprocess": bool, "in_view_goal": bool, "horizon_filter": bool, "filter_window": int,
}


def planner_params_from(section, base: PlannerParams = PlannerParams()) -> PlannerParams:
    """Build PlannerParams from a mapping of string values (unknown keys are errors)."""
    vals = {}
    for key, raw in section.items():
        if key not in _PLANNER_KEYS:
            raise ValueError(f"unknown planner key {key!r}")
        vals[key] = _coerce(raw, _PLANNER_KEYS[key])
    weights = ObjectiveWeights(vals.pop("w1", base.weights.w1), vals.pop("w2", base.weights.w2))
    limits = ControlLimits(
        vals.pop("v_max", base.limits.v_max),
        vals.pop("omega_max", base.limits.omega_max),
        vals.pop("dv_max", base.limits.dv_max),
        vals.pop("domega_max", base.limits.domega_max),
    )
    robot = RobotFootprint(
        vals.pop("half_width_m", base.robot.half_width_m), vals.pop("safety_margin_m", base.robot.safety_margin_m)
    )
    kw = {f.name: getattr(base, f.name) for f in fields(PlannerParams)}
    kw.update(vals, weights=weights, limits=limits, robot=robot)
    return PlannerParams(**kw)


def camera_from(section, dims: ImageDims) -> CameraModel | None:
    if not section:
        return None
    extra = set(section) - {"focal_px_640", "height_m"}
    if extra:
        raise ValueError(f"unknown camera key(s) {sorted(extra)}")
    focal = float(section.get("focal_px_640", 300.0)) * dims.width / 640.0
    return CameraModel.centered(dims, focal, float(section.get("height_m", 0.5))).validate()


_ENV_KEYS = {
    "kind": str, "spacing_m": float, "obstacle_radius_m": float, "obstacle_height_m": float,
    "corridor_length_m": float, "corridor_width_m": float, "pedestrians": int,
}


def env_spec_from(section) -> EnvironmentSpec:
    vals = {}
    for key, raw in section.items():
        if key not in _ENV_KEYS:
            raise ValueError(f"unknown scenario key {key!r}")
        vals[key] = _coerce(raw, _ENV_KEYS[key])
    if "kind" not in vals:
        raise ValueError("scenario needs a 'kind'")
    return EnvironmentSpec(**vals)


def _line_of(text: str, section: str, key: str | None = None) -> int | None:
    lines = text.splitlines()
    header = re.compile(r"^\s*\[\s*" + re.escape(section) + r"\s*\]")
    for i, line in enumerate(lines):
        if header.match(line):
            if key is None:
                return i + 1
            for j in range(i + 1, len(lines)):
                if lines[j].lstrip().startswith("["):
                    break
                if re.match(r"^\s*" + re.escape(key) + r"\s*[=:]", lines[j]):
                    return j + 1
            return i + 1
    return None


def _reader(text: str, source: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    try:
        cp.read_string(text, source=source)
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise SuiteError(f"malformed line {exc.errors[0][1] if exc.errors else ''}".strip(), source, line) from None
    except configparser.Error as exc:
        raise SuiteError(str(exc).splitlines()[0], source, getattr(exc, "lineno", None)) from None
    return cp


def parse_suite(text: str, source: str = "<suite>") -> Suite:
    cp = _reader(text, source)
    if not cp.sections():
        raise SuiteError("empty suite: no sections found", source, 1)
    if not cp.has_section("suite"):
        raise SuiteError("missing [suite] section", source, 1)
    s = cp["suite"]

    def fail(msg, section, key=None):
        raise SuiteError(msg, source, _line_of(text, section, key))

    allowed = {"name", "modes", "seeds", "resolution", "t_max", "epsilon", "workers"}
    for key in s:
        if key not in allowed:
            fail(f"unknown suite key {key!r}", "suite", key)
    try:
        modes = tuple(Mode(m.strip()) for m in s.get("modes", "full").split(",") if m.strip())
    except ValueError as exc:
        fail(str(exc), "suite", "modes")
    try:
        seeds = parse_seeds(s.get("seeds", "0"))
    except ValueError as exc:
        fail(str(exc), "suite", "seeds")
    try:
        dims = parse_resolution(s.get("resolution", "320x240"))
        t_max = float(s.get("t_max", "90"))
        epsilon = float(s.get("epsilon", "0.5"))
        workers = int(s.get("workers", "1"))
        if not (t_max > 0 and epsilon > 0 and workers >= 1):
            raise ValueError("t_max and epsilon must be positive and workers >= 1")
    except ValueError as exc:
        fail(str(exc), "suite")

    params = PlannerParams()
    if cp.has_section("planner"):
        try:
            params = planner_params_from(dict(cp["planner"]))
        except ValueError as exc:
            fail(str(exc), "planner")
    camera = None
    if cp.has_section("camera"):
        try:
            camera = camera_from(dict(cp["camera"]), dims)
        except ValueError as exc:
            fail(str(exc), "camera")

    scenarios = []
    for sec in cp.sections():
        if sec in ("suite", "planner", "camera"):
            continue
        m = re.fullmatch(r"scenario\s+(\S+)", sec)
        if not m:
            fail(f"unknown section [{sec}]", sec)
        try:
            scenarios.append(Scenario(m.group(1), env_spec_from(dict(cp[sec]))))
        except ValueError as exc:
            fail(str(exc), sec)
    if not scenarios:
        raise SuiteError("suite declares no [scenario ...] sections", source, 1)
    return Suite(s.get("name", "suite"), tuple(scenarios), modes, seeds, dims, params, camera, t_max, epsilon, workers)


def load_suite(path: str | os.PathLike) -> Suite:
    with open(path, encoding="utf-8") as fh:
        return parse_suite(fh.read(), source=os.fspath(path))


# ---- running -------------------------------------------------------------


@dataclass
class EpisodeRecord:
    scenario: str
    mode: Mode
    seed: int
    straight_line_m: float
    result: EpisodeResult


def episode_config(suite: Suite, task, mode: Mode) -> EpisodeConfig:
    return EpisodeConfig(
        task.start, task.goal, mode, suite.epsilon, suite.t_max, suite.params, suite.dims, suite.camera
    )


def _run_one(args) -> EpisodeRecord:
    suite, scenario, mode, seed = args
    env = EnvironmentSpec(**{**{f.name: getattr(scenario.env, f.name) for f in fields(EnvironmentSpec)}, "seed": seed})
    world, task = build_environment(env)
    result = run_episode(world, episode_config(suite, task, mode))
    # trajectories are dropped to keep inter-process traffic small
    result.trajectory, result.commands = result.trajectory[-1:], []
    return EpisodeRecord(scenario.name, mode, seed, task.distance, result)


def run_suite(suite: Suite, workers: int | None = None, progress=None) -> list[EpisodeRecord]:
    jobs = [(suite, sc, mode, seed) for sc in suite.scenarios for mode in suite.modes for seed in suite.seeds]
    n = workers if workers is not None else suite.workers
    records: list[EpisodeRecord] = []
    if n <= 1:
        for job in jobs:
            records.append(_run_one(job))
            if progress:
                progress(records[-1])
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            for rec in pool.map(_run_one, jobs):
                records.append(rec)
                if progress:
                    progress(rec)
    return records


# ---- reporting -----------------------------------------------------------


@dataclass
class Aggregate:
    scenario: str
    mode: Mode
    n: int
    success_rate: float
    mean_path_length_m: float  # successful episodes only
    latency_ms: tuple[float, float, float]  # p50, p90, p99 over all actions
    records: list[EpisodeRecord] = field(default_factory=list, repr=False)


def aggregate(records: list[EpisodeRecord]) -> list[Aggregate]:
    groups: dict[tuple[str, Mode], list[EpisodeRecord]] = {}
    for r in records:
        groups.setdefault((r.scenario, r.mode), []).append(r)
    out = []
    for (scenario, mode), recs in groups.items():
        ok = [r.result.path_length_m for r in recs if r.result.success]
        lat = np.concatenate([np.asarray(r.result.latencies_s) for r in recs]) * 1000.0
        pct = tuple(float(np.percentile(lat, q)) for q in (50, 90, 99)) if len(lat) else (math.nan,) * 3
        out.append(
            Aggregate(
                scenario, mode, len(recs),
                float(np.mean([r.result.success for r in recs])),
                float(np.mean(ok)) if ok else math.nan,
                pct, recs,
            )
        )
    return out


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return "" if math.isnan(v) else f"{v:.6g}"
    return str(v)


def write_report(records: list[EpisodeRecord], suite_name: str, out: io.TextIOBase) -> None:
    writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    base = {"schema_version": CSV_SCHEMA_VERSION, "suite": suite_name}
    for r in records:
        res = r.result
        writer.writerow({k: _fmt(v) for k, v in {
            **base, "row_type": "episode", "scenario": r.scenario, "mode": r.mode.value, "seed": r.seed,
            "outcome": res.outcome, "success": res.success, "collision": res.collision, "timeout": res.timeout,
            "path_length_m": res.path_length_m, "straight_line_m": r.straight_line_m, "duration_s": res.duration_s,
            "mean_latency_ms": res.mean_latency_s * 1000.0, "max_latency_ms": res.max_latency_s * 1000.0,
        }.items()})
    for a in aggregate(records):
        writer.writerow({k: _fmt(v) for k, v in {
            **base, "row_type": "aggregate", "scenario": a.scenario, "mode": a.mode.value,
            "n_episodes": a.n, "success_rate": a.success_rate, "mean_path_length_m": a.mean_path_length_m,
            "latency_p50_ms": a.latency_ms[0], "latency_p90_ms": a.latency_ms[1], "latency_p99_ms": a.latency_ms[2],
        }.items()})


def read_report(path_or_text: str) -> list[dict]:
    text = path_or_text
    if "\n" not in path_or_text and os.path.exists(path_or_text):
        with open(path_or_text, encoding="utf-8") as fh:
            text = fh.read()
    rows = list(csv.DictReader(io.StringIO(text)))
    for row in rows:
        if int(row["schema_version"]) != CSV_SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {row['schema_version']}")
    return rows
