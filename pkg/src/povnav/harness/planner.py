"""Per-frame planning pipeline and its ablated variants."""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..core import CameraModel, ImageDims, PixelCoord, pixel_angle, to_planning
from ..goalproj import goal_bearing, project_goal
from ..horizon import VisualHorizon, extract_horizon, horizon_from_heights
from ..pathgen import RobotFootprint, VisualPath, generate_path
from ..segmentation import DEFAULT_TABLE, NavigabilityTable, classes_to_navigability, postprocess_navigability
from ..servo import (
    ControlCommand,
    ControlGains,
    ControlLimits,
    ServoFeatures,
    alignment,
    clamp,
    control_command,
    proximity,
    rate_limit,
)
from ..subgoal import Hog, ObjectiveWeights, select_hog


class Mode(str, enum.Enum):
    POG_ONLY = "pog_only"
    POG_HOG = "pog_hog"
    FULL = "full"


@dataclass(frozen=True)
class PlannerParams:
    weights: ObjectiveWeights = ObjectiveWeights()
    # gains are given at 480 rows and scaled with the image height
    k_v_480: float = 0.01  # (m/s) per pixel at 480 rows
    k_omega: float = 1.0
    lambda_star_frac: float = 0.25  # desired proximity as a fraction of H
    gains: ControlGains | None = None  # explicit override of the three above
    limits: ControlLimits = ControlLimits()
    robot: RobotFootprint = RobotFootprint()
    table: NavigabilityTable = DEFAULT_TABLE
    d_max_frac: float = 0.5  # look-ahead cap as a fraction of H
    cruise_speed: float = 1.0  # pog_only linear speed, m/s
    postprocess: bool = True
    in_view_goal: bool = True
    horizon_filter: bool = False
    filter_window: int = 5

    def __post_init__(self):
        if not (self.k_v_480 > 0 and self.k_omega > 0 and 0 < self.lambda_star_frac < 1):
            raise ValueError("k_v_480, k_omega must be positive and lambda_star_frac in (0, 1)")
        if not 0 < self.d_max_frac <= 1:
            raise ValueError("d_max_frac must be in (0, 1]")
        if self.filter_window < 1:
            raise ValueError("filter_window must be >= 1")
        self.weights.validate()
        self.robot.validate()

    def gains_for(self, dims: ImageDims) -> ControlGains:
        if self.gains is not None:
            return self.gains
        h = dims.height
        return ControlGains(self.k_v_480 * 480.0 / h, self.k_omega, self.lambda_star_frac * h)


@dataclass
class Diagnostics:
    pog: PixelCoord
    theta_img: float  # planning-frame goal bearing used for HOG selection
    hog: Hog | None = None
    path: VisualPath | None = None
    horizon: VisualHorizon | None = None
    lam: float = math.nan
    phi: float = math.nan
    lookahead: float = math.nan


class HorizonFilter:
    """Caps the per-column horizon change at the running mean of recent changes."""

    def __init__(self, window: int = 5):
        self.window = window
        self._prev: np.ndarray | None = None
        self._history: deque = deque(maxlen=window)

    def reset(self) -> None:
        self._prev = None
        self._history.clear()

    def __call__(self, heights: np.ndarray) -> np.ndarray:
        heights = np.asarray(heights, dtype=np.int64)
        if self._prev is None or self._prev.shape != heights.shape:
            self._prev = heights.copy()
            return heights
        change = heights - self._prev
        if self._history:
            cap = np.maximum(np.ceil(np.mean(self._history, axis=0)), 1).astype(np.int64)
            change = np.clip(change, -cap, cap)
        self._history.append(np.abs(change))
        out = self._prev + change
        self._prev = out
        return out


def _planar_angle(pixel: PixelCoord, dims: ImageDims, fallback: float) -> float:
    p = to_planning(pixel, dims)
    return fallback if p == (0, 0) else pixel_angle(p)


def plan_step(
    semantic: np.ndarray,
    theta_g: float,
    mode: Mode | str,
    params: PlannerParams,
    camera: CameraModel,
    prev: ControlCommand = ControlCommand(),
    dt: float = 0.1,
    goal_pixel: PixelCoord | None = None,
    horizon_filter: HorizonFilter | None = None,
) -> tuple[ControlCommand, Diagnostics]:
    """One planning cycle on a semantic image.

    ``goal_pixel`` (the goal's ground pixel when it is in view) replaces the
    border POG if ``params.in_view_goal`` is set.
    """
    mode = Mode(mode)
    dims = ImageDims.of(semantic)
    limits = params.limits

    pog = project_goal(theta_g, dims)
    if params.in_view_goal and goal_pixel is not None:
        pog = PixelCoord(*goal_pixel)
    theta_img = goal_bearing(pog, dims, theta_g)
    diag = Diagnostics(pog=pog, theta_img=theta_img)

    if mode is Mode.POG_ONLY:
        diag.phi = theta_img
        gains = params.gains_for(dims)
        raw = ControlCommand(
            clamp(params.cruise_speed, limits.v_max), clamp(gains.k_omega * theta_img, limits.omega_max)
        )
        return rate_limit(raw, prev, limits, dt), diag

    nav = classes_to_navigability(semantic, params.table)
    if params.postprocess:
        nav = postprocess_navigability(nav)
    horizon, processed = extract_horizon(nav)
    if horizon_filter is not None:
        horizon = horizon_from_heights(horizon_filter(horizon.heights), dims)
        processed = horizon.processed()
    diag.horizon = horizon

    hog = select_hog(horizon, theta_img, params.weights)
    diag.hog = hog
    lam = proximity(horizon)
    gains = params.gains_for(dims)

    if mode is Mode.POG_HOG:
        phi = _planar_angle(hog.pixel, dims, float(np.clip(theta_img, -math.pi / 2, math.pi / 2)))
        radius = math.nan
    else:
        path = generate_path(processed, hog, camera, params.robot)
        diag.path = path
        phi, radius = alignment(path, lam, params.d_max_frac * dims.height, dims, fallback_bearing=theta_img)

    diag.lam, diag.phi, diag.lookahead = lam, phi, radius
    cmd = control_command(ServoFeatures(lam, phi, radius), gains, limits, prev, dt)
    return cmd, diag


@dataclass
class Planner:
    """Stateful wrapper: carries the previous command and the optional horizon filter."""

    mode: Mode
    params: PlannerParams
    camera: CameraModel
    dt: float = 0.1
    prev: ControlCommand = field(default_factory=ControlCommand)

    def __post_init__(self):
        self.mode = Mode(self.mode)
        self._filter = HorizonFilter(self.params.filter_window) if self.params.horizon_filter else None

    def reset(self) -> None:
        self.prev = ControlCommand()
        if self._filter is not None:
            self._filter.reset()

    def step(self, semantic: np.ndarray, theta_g: float, goal_pixel: PixelCoord | None = None):
        cmd, diag = plan_step(
            semantic, theta_g, self.mode, self.params, self.camera, self.prev, self.dt, goal_pixel, self._filter
        )
        self.prev = cmd
        return cmd, diag
