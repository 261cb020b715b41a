"""Proximity/alignment features and the bounded servo control law.

Linear velocity tracks the proximity error ``lambda - lambda*``; angular
velocity turns toward the look-ahead point on the visual path. Both are
clamped to the platform limits and then rate-limited against the previous
command.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .core import ImageDims, planning_arrays
from .horizon import VisualHorizon
from .pathgen import VisualPath


class ServoFeatures(NamedTuple):
    lam: float  # proximity, pixels
    phi: float  # alignment, radians, positive = left
    lookahead: float  # look-ahead radius, pixels


class ControlCommand(NamedTuple):
    v: float = 0.0
    omega: float = 0.0


@dataclass(frozen=True)
class ControlGains:
    k_v: float  # (m/s) per pixel
    k_omega: float  # (rad/s) per rad
    lambda_star: float  # pixels
    # optional (lambda threshold px, k_v multiplier) pairs, ascending thresholds
    k_v_schedule: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if not (self.k_v > 0 and self.k_omega > 0 and self.lambda_star > 0):
            raise ValueError("gains and lambda_star must be positive")

    @classmethod
    def for_dims(cls, dims: ImageDims, k_omega: float = 1.0, **kw) -> "ControlGains":
        # 0.01 (m/s)/px at 480 rows; proximity scales with image height
        return cls(k_v=4.8 / dims.height, k_omega=k_omega, lambda_star=0.25 * dims.height, **kw)

    def linear_gain(self, lam: float) -> float:
        for threshold, mult in self.k_v_schedule:
            if lam < threshold:
                return self.k_v * mult
        return self.k_v


@dataclass(frozen=True)
class ControlLimits:
    v_max: float = 2.0
    omega_max: float = math.pi
    dv_max: float = 2.0  # m/s^2
    domega_max: float = 2.0 * math.pi  # rad/s^2

    def __post_init__(self):
        if min(self.v_max, self.omega_max, self.dv_max, self.domega_max) <= 0:
            raise ValueError("control limits must be positive")


def proximity(horizon: VisualHorizon) -> float:
    if len(horizon) == 0:
        raise ValueError("empty horizon")
    x, y = planning_arrays(horizon.rows, horizon.cols, horizon.dims)
    return float(np.sqrt(np.min(x * x + y * y)))


def alignment(
    path: VisualPath,
    lam: float,
    d_max: float,
    dims: ImageDims,
    fallback_bearing: float = 0.0,
) -> tuple[float, float]:
    """Return (phi, R).

    The look-ahead point is the first path point, walking from the start,
    at least R pixels from the origin, or the last point when none is. A path
    that is only the start pixel has no direction; ``fallback_bearing`` (the
    POG bearing) is used instead.
    """
    if len(path) == 0:
        raise ValueError("empty path")
    radius = max(1.0, min(lam / 2.0, d_max))
    x, y = planning_arrays(path.rows, path.cols, dims)
    if len(path) == 1 or not np.any((x != 0) | (y != 0)):
        return float(np.clip(fallback_bearing, -math.pi / 2, math.pi / 2)), radius
    far = np.flatnonzero(x * x + y * y >= radius * radius)
    k = int(far[0]) if len(far) else len(path) - 1
    return math.atan2(float(y[k]), float(x[k])), radius


def clamp(value: float, bound: float) -> float:
    return max(-bound, min(value, bound))


def control_command(
    features: ServoFeatures,
    gains: ControlGains,
    limits: ControlLimits,
    prev: ControlCommand,
    dt: float,
) -> ControlCommand:
    if not dt > 0:
        raise ValueError("dt must be positive")
    v = clamp(gains.linear_gain(features.lam) * (features.lam - gains.lambda_star), limits.v_max)
    # planning y is positive to the left and omega counter-clockwise, so +k*phi steers toward the path
    omega = clamp(gains.k_omega * features.phi, limits.omega_max)
    return rate_limit(ControlCommand(v, omega), prev, limits, dt)


def rate_limit(cmd: ControlCommand, prev: ControlCommand, limits: ControlLimits, dt: float) -> ControlCommand:
    dv = limits.dv_max * dt
    dw = limits.domega_max * dt
    v = prev.v + clamp(cmd.v - prev.v, dv)
    omega = prev.omega + clamp(cmd.omega - prev.omega, dw)
    return ControlCommand(clamp(v, limits.v_max), clamp(omega, limits.omega_max))


def lyapunov(lam: float, phi: float, lambda_star: float) -> float:
    return 0.5 * (lam - lambda_star) ** 2 + 0.5 * phi**2


def within_bounds(commands: Sequence[ControlCommand], limits: ControlLimits, dt: float, tol: float = 1e-9) -> bool:
    prev = ControlCommand()
    for cmd in commands:
        if abs(cmd.v) > limits.v_max + tol or abs(cmd.omega) > limits.omega_max + tol:
            return False
        if abs(cmd.v - prev.v) > limits.dv_max * dt + tol:
            return False
        if abs(cmd.omega - prev.omega) > limits.domega_max * dt + tol:
            return False
        prev = cmd
    return True
