"""Navigability images from semantic labels or from depth via surface normals."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy import ndimage

from .core import BLOCKED, NAVIGABLE, CameraModel, ImageDims, as_navigability

#: depth value meaning "no return" (sky, out of range)
NO_RETURN = 0.0

_FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


class SemanticClass(enum.IntEnum):
    GRASS = 0
    TRAIL = 1
    ASPHALT = 2
    SKY = 3
    TREE = 4
    BUILDING = 5
    PERSON = 6
    ROCK = 7


N_CLASSES = len(SemanticClass)


@dataclass(frozen=True)
class NavigabilityTable:
    """Per-class navigability; ids missing from ``classes`` get ``default``."""

    classes: Mapping[int, int] = field(default_factory=dict)
    default: int = BLOCKED

    def __post_init__(self):
        for cid, value in self.classes.items():
            if cid < 0 or value not in (NAVIGABLE, BLOCKED):
                raise ValueError(f"bad navigability entry {cid} -> {value}")
        if self.default not in (NAVIGABLE, BLOCKED):
            raise ValueError("default must be 0 or 1")

    @classmethod
    def from_navigable(cls, navigable, blocked=(), default: int = BLOCKED) -> "NavigabilityTable":
        classes = {int(c): NAVIGABLE for c in navigable}
        classes.update({int(c): BLOCKED for c in blocked})
        return cls(classes, default)

    def lookup_array(self, max_id: int) -> np.ndarray:
        size = max(max_id, max(self.classes, default=0)) + 1
        lut = np.full(size, self.default, dtype=np.uint8)
        for cid, value in self.classes.items():
            lut[cid] = value
        return lut


DEFAULT_TABLE = NavigabilityTable.from_navigable(
    navigable=(SemanticClass.GRASS, SemanticClass.TRAIL, SemanticClass.ASPHALT),
    blocked=(
        SemanticClass.SKY,
        SemanticClass.TREE,
        SemanticClass.BUILDING,
        SemanticClass.PERSON,
        SemanticClass.ROCK,
    ),
)


def classes_to_navigability(seg: np.ndarray, table: NavigabilityTable = DEFAULT_TABLE) -> np.ndarray:
    seg = np.asarray(seg)
    if seg.ndim != 2:
        raise ValueError("semantic image must be 2-D")
    if seg.size and seg.min() < 0:
        raise ValueError("class ids must be non-negative")
    lut = table.lookup_array(int(seg.max(initial=0)))
    return lut[seg]


def _camera_to_world(camera: CameraModel) -> np.ndarray:
    """Rows are the world (forward, left, up) images of camera x-right, y-down, z-forward."""
    p = camera.pitch  # positive = nose down
    right = (0.0, -1.0, 0.0)
    down = (-math.sin(p), 0.0, -math.cos(p))
    forward = (math.cos(p), 0.0, -math.sin(p))
    return np.array([right, down, forward])


def backproject(depth: np.ndarray, camera: CameraModel) -> np.ndarray:
    """Camera-frame 3-D points ``(H, W, 3)`` for a z-depth image."""
    h, w = depth.shape
    rows = np.arange(h, dtype=float)[:, None]
    cols = np.arange(w, dtype=float)[None, :]
    z = depth.astype(float)
    x = (cols - camera.principal_col) * z / camera.focal_px
    y = (rows - camera.principal_row) * z / camera.focal_px
    return np.stack(np.broadcast_arrays(x, y, z), axis=-1)


def surface_normals(depth: np.ndarray, camera: CameraModel) -> np.ndarray:
    """Unit world-frame normals from the triangle (i, j), (i-1, j), (i, j-1).

    Pixels in the first row/column, or with any invalid depth among the three,
    hold NaN.
    """
    depth = np.asarray(depth, dtype=float)
    if depth.ndim != 2:
        raise ValueError("depth image must be 2-D")
    ImageDims.of(depth).validate()
    camera.validate()
    if np.any(depth < 0):
        raise ValueError("negative depth")

    valid = np.isfinite(depth) & (depth > NO_RETURN)
    pts = backproject(np.where(valid, depth, 0.0), camera)

    normals = np.full(pts.shape, np.nan)
    v_up = pts[1:, 1:] - pts[:-1, 1:]
    v_left = pts[1:, 1:] - pts[1:, :-1]
    n = np.cross(v_up, v_left)
    norm = np.linalg.norm(n, axis=-1, keepdims=True)
    ok = valid[1:, 1:] & valid[:-1, 1:] & valid[1:, :-1] & (norm[..., 0] > 0)
    with np.errstate(invalid="ignore", divide="ignore"):
        n = n / norm
    n = n @ _camera_to_world(camera)
    n[~ok] = np.nan
    normals[1:, 1:] = n
    return normals


def normals_to_navigability(normals: np.ndarray, up_tolerance: float = 20.0) -> np.ndarray:
    """0 where the normal is within ``up_tolerance`` degrees of world up."""
    if not 0.0 < up_tolerance < 90.0:
        raise ValueError("up_tolerance must lie in (0, 90) degrees")
    up_component = np.asarray(normals)[..., 2]
    with np.errstate(invalid="ignore"):
        flat = up_component >= math.cos(math.radians(up_tolerance))
    return np.where(flat, NAVIGABLE, BLOCKED).astype(np.uint8)


def depth_to_navigability(depth: np.ndarray, camera: CameraModel, up_tolerance: float = 20.0) -> np.ndarray:
    return normals_to_navigability(surface_normals(depth, camera), up_tolerance)


def postprocess_navigability(nav: np.ndarray) -> np.ndarray:
    """Block navigable regions that are not 4-connected to the bottom row."""
    nav = as_navigability(nav)
    labels, _ = ndimage.label(nav == NAVIGABLE, structure=_FOUR_CONNECTED)
    keep = np.zeros(labels.max() + 1, dtype=bool)
    keep[labels[-1]] = True
    keep[0] = False
    return np.where(keep[labels], NAVIGABLE, BLOCKED).astype(np.uint8)


def inject_noise(
    nav: np.ndarray,
    rng: np.random.Generator,
    flip_prob: float = 0.0,
    jitter_rows: int = 0,
) -> np.ndarray:
    """Corrupt a navigability image: independent cell flips plus per-column vertical jitter."""
    nav = as_navigability(nav).copy()
    if not 0.0 <= flip_prob <= 1.0:
        raise ValueError("flip_prob must lie in [0, 1]")
    if jitter_rows < 0:
        raise ValueError("jitter_rows must be non-negative")
    h, w = nav.shape
    if jitter_rows:
        shifts = rng.integers(-jitter_rows, jitter_rows + 1, size=w)
        src = np.clip(np.arange(h)[:, None] - shifts[None, :], 0, h - 1)
        nav = nav[src, np.arange(w)[None, :]]
    if flip_prob:
        nav ^= (rng.random(nav.shape) < flip_prob).astype(np.uint8)
    return nav
