"""Goal direction to image-border pixel (the peripheral optic goal, POG).

Forward goals are ray-cast from the planning origin to the left/top/right
borders. Goals behind the robot are ray-cast into the borders mirrored about
the bottom edge, and the virtual hit is dropped straight onto the bottom row.
"""

from __future__ import annotations

import math
import numpy as np

from .core import ImageDims, PixelCoord, Pose2D, pixel_angle, to_planning, wrap_angle

#: bias applied to a goal exactly behind the robot so HOG, POG and start separate
BACKWARD_BIAS = 0.01


def relative_goal_angle(pose: Pose2D, goal) -> float:
    gx, gy = float(goal[0]), float(goal[1])
    if not all(math.isfinite(v) for v in (*pose, gx, gy)):
        raise ValueError("pose and goal must be finite")
    dx, dy = gx - pose.x, gy - pose.y
    if dx == 0.0 and dy == 0.0:
        raise ValueError("goal coincides with the robot position")
    return wrap_angle(math.atan2(dy, dx) - pose.theta)


def _round(v: float) -> int:
    return int(math.floor(v + 0.5))


def _border_hit(c: float, s: float, dims: ImageDims) -> tuple[float, float]:
    """Exit point of the ray (|c|, s) through the rectangle of the top/left/right borders."""
    top = dims.height - 1
    left = dims.width // 2
    right = dims.width // 2 - (dims.width - 1)
    t = math.inf
    if c > 1e-12:
        t = top / c
    if s > 1e-12:
        t = min(t, left / s)
    elif s < -1e-12:
        t = min(t, right / s)
    return c * t, s * t


def project_goal(theta_g: float, dims: ImageDims) -> PixelCoord:
    dims = dims.validate()
    theta = wrap_angle(float(theta_g))
    if theta == -math.pi:
        theta = wrap_angle(math.pi + BACKWARD_BIAS)
    c, s = math.cos(theta), math.sin(theta)
    if abs(theta) <= math.pi / 2:
        x, y = _border_hit(max(c, 0.0), s, dims)
        row = (dims.height - 1) - _round(x)
    else:
        _, y = _border_hit(-c, s, dims)
        row = dims.height - 1
    col = dims.width // 2 - _round(y)
    return PixelCoord(min(max(row, 0), dims.height - 1), min(max(col, 0), dims.width - 1))


def project_goal_in_view(pose: Pose2D, goal, camera, dims: ImageDims) -> PixelCoord | None:
    """Pixel of the goal's ground point if it is inside the image below the camera horizon."""
    dx, dy = float(goal[0]) - pose.x, float(goal[1]) - pose.y
    ch, sh = math.cos(pose.theta), math.sin(pose.theta)
    forward = ch * dx + sh * dy
    left = -sh * dx + ch * dy
    if forward <= 1e-9:
        return None
    row = camera.principal_row + camera.focal_px * camera.height_m / forward
    col = camera.principal_col - camera.focal_px * left / forward
    r, c = _round(row), _round(col)
    if row <= camera.principal_row or not (0 <= r < dims.height and 0 <= c < dims.width):
        return None
    return PixelCoord(r, c)


def goal_bearing(pog: PixelCoord, dims: ImageDims, theta_g: float) -> float:
    """Planning-frame angle of the POG; the raw direction when the POG is the origin."""
    p = to_planning(pog, dims)
    if p == (0, 0):
        return float(np.clip(theta_g, -math.pi / 2, math.pi / 2))
    return pixel_angle(p)


def border_position(pixel: PixelCoord, dims: ImageDims) -> float:
    """Arc-length of a border pixel along right (bottom->top), top (right->left), left (top->bottom)."""
    r, c = pixel
    h, w = dims.height, dims.width
    if c == w - 1:
        return float(h - 1 - r)
    if r == 0:
        return float(h - 1 + (w - 1 - c))
    if c == 0:
        return float(h - 1 + w - 1 + r)
    raise ValueError(f"{tuple(pixel)} is not on the right/top/left border")

