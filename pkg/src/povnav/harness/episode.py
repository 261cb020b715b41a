"""Closed-loop episodes: render, plan, integrate, check."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..core import CameraModel, ImageDims, Pose2D
from ..goalproj import project_goal_in_view, relative_goal_angle
from ..servo import ControlCommand
from ..simworld import World, check_collision, render_camera, step_pedestrians, step_unicycle
from ..simworld.pedestrians import SocialForceParams
from .planner import Diagnostics, Mode, Planner, PlannerParams


@dataclass(frozen=True)
class EpisodeConfig:
    start: Pose2D
    goal: tuple[float, float]
    mode: Mode = Mode.FULL
    epsilon: float = 0.5  # goal radius, m
    t_max: float = 120.0  # s
    params: PlannerParams = PlannerParams()
    dims: ImageDims = ImageDims(640, 480)
    camera: CameraModel | None = None  # None: default camera for dims
    robot_radius: float = 0.3
    physics_dt: float = 0.05
    control_every: int = 2  # physics steps per control cycle (10 Hz at 0.05 s)
    social: SocialForceParams = SocialForceParams()

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "start", Pose2D(*map(float, self.start)))
        object.__setattr__(self, "goal", (float(self.goal[0]), float(self.goal[1])))
        if not (self.epsilon > 0 and self.t_max > 0):
            raise ValueError("epsilon and t_max must be positive")
        if not (self.physics_dt > 0 and self.control_every >= 1 and self.robot_radius > 0):
            raise ValueError("physics_dt, control_every and robot_radius must be positive")
        self.dims.validate()

    @property
    def control_dt(self) -> float:
        return self.physics_dt * self.control_every

    def camera_model(self) -> CameraModel:
        return self.camera if self.camera is not None else CameraModel.default(self.dims)


@dataclass
class EpisodeResult:
    success: bool
    collision: bool
    timeout: bool
    path_length_m: float
    duration_s: float
    final_distance_m: float
    trajectory: list[Pose2D]
    commands: list[ControlCommand]
    # wall-clock figures vary run to run; they do not take part in equality
    latencies_s: list[float] = field(default_factory=list, compare=False, repr=False)

    @property
    def mean_latency_s(self) -> float:
        return float(np.mean(self.latencies_s)) if self.latencies_s else math.nan

    @property
    def max_latency_s(self) -> float:
        return float(np.max(self.latencies_s)) if self.latencies_s else math.nan

    @property
    def outcome(self) -> str:
        return "success" if self.success else "collision" if self.collision else "timeout"


FrameHook = Callable[[int, np.ndarray, Pose2D, Diagnostics], None]


def run_episode(world: World, config: EpisodeConfig, frame_hook: FrameHook | None = None) -> EpisodeResult:
    """Simulate until the goal radius is reached, a collision occurs or t_max passes.

    The world is copied; the caller's instance is left untouched. Only the
    planning call is timed (rendering and physics are excluded).
    """
    world = world.copy()
    camera = config.camera_model()
    planner = Planner(config.mode, config.params, camera, config.control_dt)
    goal = config.goal
    pose = config.start
    cmd = ControlCommand()
    trajectory, commands, latencies = [pose], [], []
    path_len = 0.0
    n_steps = int(math.ceil(config.t_max / config.physics_dt - 1e-9))
    success = collision = False
    collision = check_collision(world, pose, config.robot_radius)
    step = 0
    frame = 0
    while not collision and step < n_steps:
        if step % config.control_every == 0:
            sem, _ = render_camera(world, pose, camera, config.dims)
            theta_g = relative_goal_angle(pose, goal)
            goal_px = project_goal_in_view(pose, goal, camera, config.dims)
            t0 = time.perf_counter()
            cmd, diag = planner.step(sem, theta_g, goal_px)
            latencies.append(time.perf_counter() - t0)
            commands.append(cmd)
            if frame_hook is not None:
                frame_hook(frame, sem, pose, diag)
            frame += 1
        new_pose = step_unicycle(pose, cmd, config.physics_dt)
        path_len += math.hypot(new_pose.x - pose.x, new_pose.y - pose.y)
        pose = new_pose
        trajectory.append(pose)
        if world.agents:
            world.agents = step_pedestrians(
                world.agents, world, config.physics_dt, (pose.x, pose.y, config.robot_radius), config.social
            )
        step += 1
        collision = check_collision(world, pose, config.robot_radius)
        if not collision and math.hypot(goal[0] - pose.x, goal[1] - pose.y) <= config.epsilon:
            success = True
            break

    final = math.hypot(goal[0] - pose.x, goal[1] - pose.y)
    return EpisodeResult(
        success=success,
        collision=collision,
        timeout=not (success or collision),
        path_length_m=path_len,
        duration_s=step * config.physics_dt,
        final_distance_m=final,
        trajectory=trajectory,
        commands=commands,
        latencies_s=latencies,
    )
