"""World description, unicycle kinematics and collision checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..core import Pose2D, wrap_angle
from ..segmentation import SemanticClass
from ..servo import ControlCommand

#: pedestrian speed cap, m/s
PEDESTRIAN_MAX_SPEED = 1.7


@dataclass(frozen=True)
class Cylinder:
    x: float
    y: float
    radius: float
    height_m: float = 2.0
    class_id: int = int(SemanticClass.TREE)

    def __post_init__(self):
        if not (self.radius > 0 and self.height_m > 0):
            raise ValueError("cylinder radius and height must be positive")


@dataclass(frozen=True)
class Wall:
    """Axis-aligned box extruded from the ground."""

    x0: float
    y0: float
    x1: float
    y1: float
    height_m: float = 2.0
    class_id: int = int(SemanticClass.BUILDING)

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError("wall must have x1 > x0 and y1 > y0")
        if not self.height_m > 0:
            raise ValueError("wall height must be positive")

    def distance(self, px, py):
        dx = np.maximum(np.maximum(self.x0 - px, px - self.x1), 0.0)
        dy = np.maximum(np.maximum(self.y0 - py, py - self.y1), 0.0)
        return np.hypot(dx, dy)

    def nearest_point(self, px: float, py: float) -> tuple[float, float]:
        return min(max(px, self.x0), self.x1), min(max(py, self.y0), self.y1)


@dataclass(frozen=True)
class GroundRegion:
    x0: float
    y0: float
    x1: float
    y1: float
    class_id: int

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError("region must have x1 > x0 and y1 > y0")


@dataclass
class Pedestrian:
    position: np.ndarray
    velocity: np.ndarray
    goal: np.ndarray
    v_des: float = 1.3
    radius: float = 0.3
    height_m: float = 1.7
    # when set, the agent walks back and forth between home and goal
    home: np.ndarray | None = None

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float).reshape(2)
        self.velocity = np.asarray(self.velocity, dtype=float).reshape(2)
        self.goal = np.asarray(self.goal, dtype=float).reshape(2)
        if self.home is not None:
            self.home = np.asarray(self.home, dtype=float).reshape(2)
        if not (self.radius > 0 and self.height_m > 0 and self.v_des >= 0):
            raise ValueError("pedestrian radius/height must be positive and v_des non-negative")
        if np.hypot(*self.velocity) > PEDESTRIAN_MAX_SPEED + 1e-9:
            raise ValueError("pedestrian speed exceeds the cap")

    def copy(self) -> "Pedestrian":
        return replace(
            self,
            position=self.position.copy(),
            velocity=self.velocity.copy(),
            goal=self.goal.copy(),
            home=None if self.home is None else self.home.copy(),
        )


@dataclass
class World:
    ground_class: int = int(SemanticClass.GRASS)
    regions: list[GroundRegion] = field(default_factory=list)
    obstacles: list[Cylinder] = field(default_factory=list)
    walls: list[Wall] = field(default_factory=list)
    agents: list[Pedestrian] = field(default_factory=list)

    def copy(self) -> "World":
        return World(
            self.ground_class,
            list(self.regions),
            list(self.obstacles),
            list(self.walls),
            [a.copy() for a in self.agents],
        )

    def circle_arrays(self, include_agents: bool = True):
        """(x, y, radius, height, class) arrays for static cylinders followed by agents."""
        rows = [(o.x, o.y, o.radius, o.height_m, o.class_id) for o in self.obstacles]
        if include_agents:
            person = int(SemanticClass.PERSON)
            rows += [(a.position[0], a.position[1], a.radius, a.height_m, person) for a in self.agents]
        arr = np.array(rows, dtype=float).reshape(-1, 5)
        return arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], arr[:, 4].astype(np.int64)


def step_unicycle(pose: Pose2D, cmd: ControlCommand, dt: float) -> Pose2D:
    if not dt > 0:
        raise ValueError("dt must be positive")
    x, y, th = pose
    return Pose2D(
        x + cmd.v * math.cos(th) * dt,
        y + cmd.v * math.sin(th) * dt,
        float(wrap_angle(th + cmd.omega * dt)),
    )


def clearance(world: World, x: float, y: float) -> float:
    """Signed distance from a point to the nearest obstacle, agent or wall surface."""
    best = math.inf
    cx, cy, r, _, _ = world.circle_arrays()
    if len(cx):
        best = float(np.min(np.hypot(cx - x, cy - y) - r))
    for wall in world.walls:
        best = min(best, float(wall.distance(x, y)))
    return best


def check_collision(world: World, pose: Pose2D, robot_radius: float) -> bool:
    # compare center distance against the radius sum so touching is exact
    cx, cy, r, _, _ = world.circle_arrays()
    if len(cx) and np.any(np.hypot(cx - pose.x, cy - pose.y) < r + robot_radius):
        return True
    return any(float(w.distance(pose.x, pose.y)) < robot_radius for w in world.walls)
