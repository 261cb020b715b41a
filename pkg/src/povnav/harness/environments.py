"""Benchmark environment builders and start/goal sampling.

All layouts are in meters. Each builder returns a World plus a sampled
(start pose, goal) pair drawn from a generator seeded by the spec, so the
same spec always yields the same scene and task.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import Pose2D
from ..segmentation import SemanticClass
from ..simworld import Cylinder, Pedestrian, Wall, World
from ..simworld.world import clearance

KINDS = ("grid_field", "corridor", "l_corridor", "free")

#: straight-line start-goal distance in the open environments
TASK_DISTANCE_M = 32.0


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EnvironmentSpec:
    kind: str = "free"
    spacing_m: float = 3.0  # grid_field: free gap between neighboring cylinder surfaces
    obstacle_radius_m: float = 0.25
    obstacle_height_m: float = 2.0
    corridor_length_m: float = 30.0
    corridor_width_m: float = 6.0
    pedestrians: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown environment kind {self.kind!r}; expected one of {KINDS}")
        if not self.spacing_m > 0:
            raise ConfigError("spacing_m must be positive")
        if not (self.obstacle_radius_m > 0 and self.obstacle_height_m > 0):
            raise ConfigError("obstacle radius and height must be positive")
        if not (self.corridor_length_m > 4 and self.corridor_width_m > 2):
            raise ConfigError("corridor must be longer than 4 m and wider than 2 m")
        if self.pedestrians < 0:
            raise ConfigError("pedestrian count must be >= 0")


@dataclass(frozen=True)
class Task:
    start: Pose2D
    goal: tuple[float, float]

    @property
    def distance(self) -> float:
        return math.hypot(self.goal[0] - self.start.x, self.goal[1] - self.start.y)


def _heading(start, goal) -> float:
    return math.atan2(goal[1] - start[1], goal[0] - start[0])


def _segment_blocked(world: World, a, b, inflate: float) -> bool:
    for s in np.linspace(0.0, 1.0, 200):
        p = (a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]))
        if clearance(world, *p) < inflate:
            return True
    return False


def _free_task(rng: np.random.Generator) -> tuple[World, Task]:
    bearing = rng.uniform(-math.pi / 2, math.pi / 2)
    goal = (TASK_DISTANCE_M * math.cos(bearing), TASK_DISTANCE_M * math.sin(bearing))
    return World(), Task(Pose2D(0.0, 0.0, 0.0), goal)


def _grid_field(spec: EnvironmentSpec, rng: np.random.Generator, robot_radius: float) -> tuple[World, Task]:
    r = spec.obstacle_radius_m
    pitch = spec.spacing_m + 2 * r
    # lattice over the middle of the route; random phase per seed
    x_lo, x_hi, half_w = 3.0, TASK_DISTANCE_M - 3.0, 16.0
    phase = rng.uniform(0.0, pitch, size=2)
    xs = np.arange(x_lo + phase[0], x_hi, pitch)
    ys = np.arange(-half_w + phase[1], half_w, pitch)
    obstacles = [
        Cylinder(float(x), float(y), r, spec.obstacle_height_m, int(SemanticClass.TREE)) for x in xs for y in ys
    ]
    world = World(obstacles=obstacles)
    for _ in range(1000):
        sy = rng.uniform(-3.0, 3.0)
        bearing = rng.uniform(-0.2, 0.2)
        start = (0.0, sy)
        goal = (TASK_DISTANCE_M * math.cos(bearing), sy + TASK_DISTANCE_M * math.sin(bearing))
        # the straight route must be obstructed, otherwise the episode tests nothing
        if _segment_blocked(world, start, goal, robot_radius):
            return world, Task(Pose2D(*start, _heading(start, goal)), goal)
    raise ConfigError("could not sample an obstructed start/goal pair")


def _corridor_walls(length: float, width: float, t: float = 0.2) -> list[Wall]:
    hw = width / 2
    return [
        Wall(0.0 - t, hw, length + t, hw + t),
        Wall(0.0 - t, -hw - t, length + t, -hw),
        Wall(-t, -hw, 0.0, hw),
        Wall(length, -hw, length + t, hw),
    ]


def _spawn_pedestrians(rng, n: int, region, goals_fn, clear_of, min_gap: float = 0.3) -> list[Pedestrian]:
    agents: list[Pedestrian] = []
    x0, x1, y0, y1 = region
    tries = 0
    while len(agents) < n:
        tries += 1
        if tries > 10000:
            raise ConfigError("could not place pedestrians")
        p = np.array([rng.uniform(x0, x1), rng.uniform(y0, y1)])
        if any(np.hypot(*(p - q)) < r + 0.3 + min_gap for q, r in clear_of):
            continue
        if any(np.hypot(*(p - a.position)) < 0.6 + min_gap for a in agents):
            continue
        goal = goals_fn(p)
        agents.append(Pedestrian(p, (0.0, 0.0), goal, float(rng.uniform(0.8, 1.5)), 0.3, home=p.copy()))
    return agents


def _corridor(spec: EnvironmentSpec, rng: np.random.Generator) -> tuple[World, Task]:
    length, width = spec.corridor_length_m, spec.corridor_width_m
    hw = width / 2
    start = (1.5, float(rng.uniform(-hw + 1.0, hw - 1.0)))
    goal = (length - 1.5, float(rng.uniform(-hw + 1.0, hw - 1.0)))

    def goals_fn(p):
        # walk to the farther end, on a random lane
        gx = length - 1.0 if p[0] < length / 2 else 1.0
        return np.array([gx, rng.uniform(-hw + 0.6, hw - 0.6)])

    agents = _spawn_pedestrians(
        rng, spec.pedestrians, (4.0, length - 4.0, -hw + 0.5, hw - 0.5), goals_fn, [(np.array(start), 1.5)]
    )
    world = World(walls=_corridor_walls(length, width), agents=agents)
    return world, Task(Pose2D(*start, _heading(start, goal)), goal)


def _l_corridor(spec: EnvironmentSpec, rng: np.random.Generator) -> tuple[World, Task]:
    # leg A along +x from (0, -hw) to (L, hw); leg B along +y from the corner
    L, wd = spec.corridor_length_m, spec.corridor_width_m
    hw, t = wd / 2, 0.2
    walls = [
        Wall(-t, -hw - t, L + t, -hw),  # south wall of leg A
        Wall(-t, hw, L - wd, hw + t),  # north wall of leg A up to the corner
        Wall(-t, -hw, 0.0, hw),  # west end cap
        Wall(L, -hw, L + t, L),  # east wall running up leg B
        Wall(L - wd - t, hw, L - wd, L),  # west wall of leg B
        Wall(L - wd - t, L, L + t, L + t),  # north end cap
    ]
    start = (1.5, float(rng.uniform(-hw + 1.0, hw - 1.0)))
    goal = (L - hw + float(rng.uniform(-hw + 1.0, hw - 1.0)), L - 1.5)

    def goals_fn(p):
        # agents in leg A head up leg B and vice versa
        if p[1] < hw:
            return np.array([L - hw + rng.uniform(-hw + 0.6, hw - 0.6), L - 1.0])
        return np.array([1.0, rng.uniform(-hw + 0.6, hw - 0.6)])

    half = spec.pedestrians // 2
    clear = [(np.array(start), 1.5)]
    agents = _spawn_pedestrians(rng, half, (4.0, L - wd, -hw + 0.5, hw - 0.5), goals_fn, clear)
    agents += _spawn_pedestrians(
        rng, spec.pedestrians - half, (L - wd + 0.5, L - 0.5, hw + 1.0, L - 3.0), goals_fn, clear
    )
    world = World(walls=walls, agents=agents)
    return world, Task(Pose2D(*start, _heading(start, goal)), goal)


def build_environment(spec: EnvironmentSpec, robot_radius: float = 0.3) -> tuple[World, Task]:
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "free":
        return _free_task(rng)
    if spec.kind == "grid_field":
        return _grid_field(spec, rng, robot_radius)
    if spec.kind == "corridor":
        return _corridor(spec, rng)
    return _l_corridor(spec, rng)
