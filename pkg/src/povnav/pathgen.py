"""Safe image-space path from the start pixel to the HOG.

Rows are walked from just below the HOG down to just above the start pixel.
The column is carried from row to row and drifts along the straight line
from its last position to the start; each row also gets a safe half-width
obtained by projecting the robot half-width plus margin onto the ground plane
at that row. A blocked span is shifted sideways and the shifted column
becomes the new anchor of the drift. The side is chosen once, at the first
blocked row, and reused after that. Rows that no shift can clear are skipped
and the path is flagged as a fallback.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import BLOCKED, CameraModel, ImageDims, PixelCoord, as_navigability
from .subgoal import Hog


class RobotFootprint(NamedTuple):
    half_width_m: float = 0.25
    safety_margin_m: float = 0.05

    def validate(self) -> "RobotFootprint":
        if not (self.half_width_m > 0 and self.safety_margin_m > 0):
            raise ValueError("half width and safety margin must be positive")
        return self


class PathMode(str, enum.Enum):
    SAFE = "safe"
    FALLBACK = "fallback"


@dataclass(frozen=True, eq=False)
class VisualPath:
    rows: np.ndarray  # start -> HOG
    cols: np.ndarray
    mode: PathMode
    skipped_rows: tuple[int, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def points(self) -> list[PixelCoord]:
        return [PixelCoord(r, c) for r, c in zip(self.rows.tolist(), self.cols.tolist())]


class PathContractError(ValueError):
    """The HOG handed to the path generator lies above the horizon."""


def safe_halfwidths(rows, camera: CameraModel, robot: RobotFootprint, width: int) -> np.ndarray:
    """Per-row half-width in pixels of the robot footprint plus margin (ground-plane model).

    A lateral offset ``w`` at depth ``f*h/(row - cy)`` spans ``w*(row - cy)/h``
    pixels; rows at or above the principal row are infinitely far and get 1.
    """
    below = np.asarray(rows, dtype=float) - camera.principal_row
    px = np.floor((robot.half_width_m + robot.safety_margin_m) * below / camera.height_m + 0.5)
    px = np.where(below > 0, px, 1)
    return np.clip(px, 1, width // 2).astype(np.int64)


def safe_halfwidth(row: int, camera: CameraModel, robot: RobotFootprint, dims: ImageDims) -> int:
    if not 0 <= row < dims.height:
        raise ValueError(f"row {row} outside image of height {dims.height}")
    return int(safe_halfwidths(row, camera, robot, dims.width))


def _span_blocked_counts(csum_row: np.ndarray, half: int, width: int) -> np.ndarray:
    cols = np.arange(width)
    lo = np.maximum(cols - half, 0)
    hi = np.minimum(cols + half, width - 1)
    return csum_row[hi + 1] - csum_row[lo]


def _nearest_blocker_gap(nav_row: np.ndarray, col: int, half: int, side: int) -> int:
    """Distance from ``col`` to the nearest blocked pixel inside the span on one side."""
    width = len(nav_row)
    for d in range(half + 1):
        c = col + side * d
        if c < 0 or c >= width:
            break
        if nav_row[c] == BLOCKED:
            return d
    return half + 1


def find_shift_direction(nav_row, col, half, left_col, right_col) -> int | None:
    """-1 (toward smaller columns), +1, or None when neither side clears inside the image."""
    can_left, can_right = left_col >= 0, right_col >= 0
    if not (can_left or can_right):
        return None
    if can_left != can_right:
        return -1 if can_left else 1
    gap_left = _nearest_blocker_gap(nav_row, col, half, -1)
    gap_right = _nearest_blocker_gap(nav_row, col, half, +1)
    if gap_left != gap_right:
        return -1 if gap_left > gap_right else 1
    return -1 if col - left_col <= right_col - col else 1


def generate_path(
    processed_nav: np.ndarray,
    hog: Hog | PixelCoord,
    camera: CameraModel,
    robot: RobotFootprint = RobotFootprint(),
) -> VisualPath:
    nav = as_navigability(processed_nav)
    dims = ImageDims.of(nav)
    robot.validate()
    camera.validate()
    h, w = nav.shape
    target = hog.pixel if isinstance(hog, Hog) else PixelCoord(*hog)
    if not (0 <= target.row < h and 0 <= target.col < w):
        raise PathContractError(f"HOG {tuple(target)} outside the image")
    if nav[target.row + 1 :, target.col].any():
        raise PathContractError(f"HOG {tuple(target)} lies above the visual horizon")

    start = dims.origin
    if tuple(target) == tuple(start):
        return VisualPath(np.array([start.row]), np.array([start.col]), PathMode.SAFE)
    if target.row == h - 1:
        return VisualPath(
            np.array([start.row, target.row]), np.array([start.col, target.col]), PathMode.SAFE
        )

    rows = np.arange(target.row + 1, h - 1)
    halves = safe_halfwidths(rows, camera, robot, w)
    csum = np.zeros((len(rows), w + 1), dtype=np.int32)
    np.cumsum(nav[rows], axis=1, out=csum[:, 1:])

    cols = np.zeros(len(rows), dtype=np.int64)
    keep = np.ones(len(rows), dtype=bool)
    direction: int | None = None
    all_cols = np.arange(w)
    # x is carried from row to row and drifts linearly toward the start
    x = float(target.col)
    for i, row in enumerate(rows.tolist()):
        x += (start.col - x) / (h - row)
        c, half = int(math.floor(x + 0.5)), int(halves[i])
        lo, hi = max(c - half, 0), min(c + half, w - 1)
        if csum[i, hi + 1] - csum[i, lo] == 0:
            cols[i] = c
            continue
        clear = _span_blocked_counts(csum[i], half, w) == 0
        left = all_cols[:c][clear[:c]]
        right = all_cols[c + 1 :][clear[c + 1 :]]
        left_col = int(left[-1]) if len(left) else -1
        right_col = int(right[0]) if len(right) else -1
        if direction is None:
            direction = find_shift_direction(nav[row], c, half, left_col, right_col)
            if direction is None:
                keep[i] = False
                continue
        preferred, other = (left_col, right_col) if direction < 0 else (right_col, left_col)
        chosen = preferred if preferred >= 0 else other
        if chosen < 0:
            keep[i] = False
            continue
        cols[i] = chosen
        x = float(chosen)

    path_rows = np.concatenate(([start.row], rows[keep][::-1], [target.row]))
    path_cols = np.concatenate(([start.col], cols[keep][::-1], [target.col]))
    skipped = tuple(int(r) for r in rows[~keep])
    mode = PathMode.FALLBACK if skipped else PathMode.SAFE
    return VisualPath(path_rows, path_cols, mode, skipped)
