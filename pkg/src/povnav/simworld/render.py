"""Column ray-cast renderer producing semantic and z-depth images.

Every image column casts one horizontal ray from the camera. Cylinders and
wall boxes hit by the ray are extruded into vertical bands by similar
triangles; the ``LAYERS`` nearest hits are painted far-to-near so closer
objects occlude farther ones. Unoccluded rows below the principal row show
the ground, rows above it show the sky.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from ..core import CameraModel, ImageDims, Pose2D
from ..segmentation import NO_RETURN, SemanticClass
from .world import World

LAYERS = 3
#: depth readings beyond this range are reported as no return
MAX_RANGE_M = 50.0
_CHUNK = 256


@lru_cache(maxsize=16)
def _column_angles(camera: CameraModel, width: int) -> np.ndarray:
    # positive angle = left of the optical axis
    cols = np.arange(width, dtype=float)
    return np.arctan2(camera.principal_col - cols, camera.focal_px)


def _circle_hits(ox, oy, dx, dy, cx, cy, r):
    """Entry distance along each ray (columns) for each circle; inf on a miss. Shape (n, W)."""
    px = ox - cx[:, None]
    py = oy - cy[:, None]
    b = px * dx[None, :] + py * dy[None, :]
    c = (px * px + py * py - r[:, None] ** 2)
    disc = b * b - c
    with np.errstate(invalid="ignore"):
        root = np.sqrt(disc)
    t_in = -b - root
    t_out = -b + root
    hit = (disc >= 0) & (t_out > 0)
    return np.where(hit, np.maximum(t_in, 1e-6), np.inf)


def _box_hits(ox, oy, dx, dy, boxes):
    """Slab-method entry distances for axis-aligned boxes. Shape (n, W)."""
    out = np.full((len(boxes), len(dx)), np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_x = 1.0 / dx
        inv_y = 1.0 / dy
        for k, w in enumerate(boxes):
            tx0, tx1 = (w.x0 - ox) * inv_x, (w.x1 - ox) * inv_x
            ty0, ty1 = (w.y0 - oy) * inv_y, (w.y1 - oy) * inv_y
            # a ray parallel to a slab is inside it or misses it entirely
            inside_x = (w.x0 <= ox) & (ox <= w.x1)
            inside_y = (w.y0 <= oy) & (oy <= w.y1)
            lo_x = np.where(dx == 0, np.where(inside_x, -np.inf, np.inf), np.minimum(tx0, tx1))
            hi_x = np.where(dx == 0, np.where(inside_x, np.inf, -np.inf), np.maximum(tx0, tx1))
            lo_y = np.where(dy == 0, np.where(inside_y, -np.inf, np.inf), np.minimum(ty0, ty1))
            hi_y = np.where(dy == 0, np.where(inside_y, np.inf, -np.inf), np.maximum(ty0, ty1))
            t_near = np.maximum(lo_x, lo_y)
            t_far = np.minimum(hi_x, hi_y)
            hit = (t_near <= t_far) & (t_far > 0)
            out[k] = np.where(hit, np.maximum(t_near, 1e-6), np.inf)
    return out


def _merge(best_t, best_i, new_t, new_idx):
    """Keep the LAYERS smallest distances per column (unordered)."""
    t = np.concatenate([best_t, new_t])
    i = np.concatenate([best_i, np.broadcast_to(np.asarray(new_idx)[:, None], new_t.shape)])
    part = np.argpartition(t, LAYERS - 1, axis=0)[:LAYERS]
    return np.take_along_axis(t, part, 0), np.take_along_axis(i, part, 0)


def nearest_hits(world: World, pose: Pose2D, camera: CameraModel, width: int):
    """Per-column ray distances (LAYERS, W), object heights and classes of the nearest hits.

    Objects are walls first, then cylinders, then agents; index -1 marks no hit.
    """
    alpha = _column_angles(camera, width)
    ang = pose.theta + alpha
    dx, dy = np.cos(ang), np.sin(ang)
    ox, oy = pose.x, pose.y

    cx, cy, r, h_c, cls_c = world.circle_arrays()
    walls = world.walls
    heights = np.concatenate([[w.height_m for w in walls], h_c]).astype(float)
    classes = np.concatenate([[w.class_id for w in walls], cls_c]).astype(np.int64)

    best_t = np.full((LAYERS, width), np.inf)
    best_i = np.full((LAYERS, width), -1, dtype=np.int64)
    if walls:
        best_t, best_i = _merge(best_t, best_i, _box_hits(ox, oy, dx, dy, walls), np.arange(len(walls)))

    if len(cx):
        # cull circles outside the view cone, then visit them near-to-far in
        # chunks and stop once no remaining circle can enter the nearest layers
        rel_x, rel_y = cx - ox, cy - oy
        dist = np.hypot(rel_x, rel_y)
        half_fov = float(np.max(np.abs(alpha)))
        bearing = np.abs(np.arctan2(rel_y, rel_x) - pose.theta)
        bearing = np.minimum(bearing % (2 * math.pi), 2 * math.pi - bearing % (2 * math.pi))
        slack = np.arcsin(np.clip(r / np.maximum(dist, 1e-9), 0, 1))
        visible = (dist <= r) | (bearing <= half_fov + slack + 1e-9)
        cand = np.flatnonzero(visible)
        cand = cand[np.argsort(dist[cand] - r[cand], kind="stable")]
        for s in range(0, len(cand), _CHUNK):
            chunk = cand[s : s + _CHUNK]
            if float(dist[chunk[0]] - r[chunk[0]]) > float(best_t.max()):
                break
            hits = _circle_hits(ox, oy, dx, dy, cx[chunk], cy[chunk], r[chunk])
            best_t, best_i = _merge(best_t, best_i, hits, len(walls) + chunk)

    order = np.argsort(best_t, axis=0, kind="stable")
    best_t = np.take_along_axis(best_t, order, 0)
    best_i = np.take_along_axis(best_i, order, 0)
    best_i = np.where(np.isfinite(best_t), best_i, -1)
    return best_t, best_i, heights, classes, alpha


def ground_rows(camera: CameraModel, height: int) -> np.ndarray:
    rows = np.arange(height)
    return rows[rows > camera.principal_row]


def render_camera(
    world: World,
    pose: Pose2D,
    camera: CameraModel,
    dims: ImageDims,
    max_range: float = MAX_RANGE_M,
) -> tuple[np.ndarray, np.ndarray]:
    """Return (semantic uint8 image, z-depth float32 image in meters, 0 = no return)."""
    camera.validate()
    if camera.pitch != 0:
        raise ValueError("the renderer supports zero camera pitch only")
    h, w = dims.height, dims.width
    f, cy, cam_h = camera.focal_px, camera.principal_row, camera.height_m

    sem = np.full((h, w), int(SemanticClass.SKY), dtype=np.uint8)
    depth = np.full((h, w), NO_RETURN, dtype=np.float32)

    t_hit, i_hit, heights, classes, alpha = nearest_hits(world, pose, camera, w)
    cos_a = np.cos(alpha)

    g_rows = ground_rows(camera, h)
    if len(g_rows):
        z = f * cam_h / (g_rows - cy)
        sem[g_rows] = _ground_classes(world, pose, z, alpha)
        depth[g_rows] = np.where(z <= max_range, z, NO_RETURN)[:, None]

    rows = np.arange(h)[:, None]
    for layer in range(t_hit.shape[0] - 1, -1, -1):
        valid = i_hit[layer] >= 0
        if not valid.any():
            continue
        z = np.where(valid, t_hit[layer] * cos_a, np.inf)
        idx = np.where(valid, i_hit[layer], 0)
        obj_h = heights[idx]
        with np.errstate(divide="ignore"):
            r_base = cy + f * cam_h / z
            r_top = cy - f * (obj_h - cam_h) / z
        paint = valid & np.isfinite(z)
        mask = (rows >= np.ceil(r_top)[None, :]) & (rows <= np.floor(r_base)[None, :]) & paint[None, :]
        sem = np.where(mask, classes[idx][None, :].astype(np.uint8), sem)
        zval = np.where(z <= max_range, z, NO_RETURN).astype(np.float32)
        depth = np.where(mask, zval[None, :], depth)
    return sem, depth


def _ground_classes(world: World, pose: Pose2D, z: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    n, w = len(z), len(alpha)
    if not world.regions:
        return np.full((n, w), world.ground_class, dtype=np.uint8)
    forward = z[:, None]
    left = z[:, None] * np.tan(alpha)[None, :]
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    gx = pose.x + c * forward - s * left
    gy = pose.y + s * forward + c * left
    out = np.full((n, w), world.ground_class, dtype=np.uint8)
    for reg in world.regions:  # later regions win
        inside = (gx >= reg.x0) & (gx <= reg.x1) & (gy >= reg.y0) & (gy <= reg.y1)
        out[inside] = reg.class_id
    return out


def ground_point(pixel_row: int, pixel_col: int, pose: Pose2D, camera: CameraModel) -> tuple[float, float] | None:
    """World ground point seen through a pixel, or None above the principal row."""
    below = pixel_row - camera.principal_row
    if below <= 0:
        return None
    z = camera.focal_px * camera.height_m / below
    left = z * (camera.principal_col - pixel_col) / camera.focal_px
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    return pose.x + c * z - s * left, pose.y + s * z + c * left
