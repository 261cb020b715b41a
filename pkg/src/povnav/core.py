"""Image-grid and planning-frame geometry shared by every stage of the planner.

Pixel coordinates are (row, col) with row 0 at the top. The planning frame is
anchored at the bottom-center pixel: ``x`` points up the image (away from the
robot) and ``y`` points left, so ``x = (H - 1) - row`` and ``y = floor(W/2) - col``.
Navigability images are ``(H, W)`` uint8 arrays, 0 = navigable, 1 = blocked.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

NAVIGABLE = 0
BLOCKED = 1


class PixelCoord(NamedTuple):
    row: int
    col: int


class PlanarPoint(NamedTuple):
    x: int
    y: int


class Pose2D(NamedTuple):
    x: float  # meters
    y: float
    theta: float  # radians, [-pi, pi)


class ImageDims(NamedTuple):
    width: int
    height: int

    def validate(self) -> "ImageDims":
        if self.width < 2 or self.height < 2:
            raise ValueError(f"image must be at least 2x2, got {self.width}x{self.height}")
        return self

    @property
    def origin_col(self) -> int:
        return self.width // 2

    @property
    def origin(self) -> PixelCoord:
        return PixelCoord(self.height - 1, self.width // 2)

    @property
    def diagonal(self) -> float:
        """Largest pixel-center distance spanned by the image."""
        return math.hypot(self.width - 1, self.height - 1)

    @classmethod
    def of(cls, image: np.ndarray) -> "ImageDims":
        h, w = image.shape[:2]
        return cls(int(w), int(h))


def wrap_angle(a):
    """Wrap an angle (scalar or array) into [-pi, pi)."""
    return (a + math.pi) % (2.0 * math.pi) - math.pi


def in_bounds(pixel: PixelCoord, dims: ImageDims) -> bool:
    return 0 <= pixel[0] < dims.height and 0 <= pixel[1] < dims.width


def to_planning(pixel: PixelCoord, dims: ImageDims) -> PlanarPoint:
    if not in_bounds(pixel, dims):
        raise ValueError(f"pixel {tuple(pixel)} outside {dims.width}x{dims.height} image")
    return PlanarPoint((dims.height - 1) - int(pixel[0]), dims.width // 2 - int(pixel[1]))


def from_planning(p: PlanarPoint, dims: ImageDims) -> PixelCoord:
    pixel = PixelCoord((dims.height - 1) - int(p[0]), dims.width // 2 - int(p[1]))
    if not in_bounds(pixel, dims):
        raise ValueError(f"planar point {tuple(p)} maps outside the image")
    return pixel


def planning_arrays(rows: np.ndarray, cols: np.ndarray, dims: ImageDims):
    """Vectorized ``to_planning`` without bounds checks."""
    return (dims.height - 1) - np.asarray(rows), dims.width // 2 - np.asarray(cols)


def pixel_angle(p: PlanarPoint) -> float:
    """Bearing of a planning-frame point from the x axis, positive to the left."""
    x, y = p
    if x == 0 and y == 0:
        raise ValueError("angle of the origin is undefined")
    a = math.atan2(y, x)
    return -math.pi if a >= math.pi else a


def as_navigability(image) -> np.ndarray:
    """Validate and return a binary navigability image as a uint8 array."""
    nav = np.asarray(image)
    if nav.ndim != 2:
        raise ValueError(f"navigability image must be 2-D, got shape {nav.shape}")
    ImageDims.of(nav).validate()
    if nav.dtype != np.uint8:
        if not np.isin(nav, (0, 1)).all():
            raise ValueError("navigability cells must be 0 or 1")
        nav = nav.astype(np.uint8)
    elif nav.max(initial=0) > 1:
        raise ValueError("navigability cells must be 0 or 1")
    return nav


class CameraModel(NamedTuple):
    """Pinhole camera mounted at the robot center, looking along the heading.

    ``principal_row``/``principal_col`` may be fractional; the default puts the
    principal point at the exact image center.
    """

    focal_px: float
    principal_row: float
    principal_col: float
    height_m: float
    pitch: float = 0.0

    @classmethod
    def centered(cls, dims: ImageDims, focal_px: float, height_m: float = 0.5) -> "CameraModel":
        return cls(float(focal_px), (dims.height - 1) / 2.0, (dims.width - 1) / 2.0, float(height_m))

    @classmethod
    def default(cls, dims: ImageDims = ImageDims(640, 480)) -> "CameraModel":
        # 300 px focal at 640 px width, scaled so the field of view is resolution independent
        return cls.centered(dims, 300.0 * dims.width / 640.0, 0.5)

    def validate(self) -> "CameraModel":
        if not self.focal_px > 0:
            raise ValueError("focal_px must be positive")
        if not self.height_m > 0:
            raise ValueError("camera height must be positive")
        return self
