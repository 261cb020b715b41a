"""Visual horizon extraction.

Each column is scanned from the bottom row upward; the horizon height of the
column is the first non-navigable pixel met. Everything at or above it is
treated as blocked in the processed image, everything below as free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BLOCKED, ImageDims, as_navigability


@dataclass(frozen=True, eq=False)
class VisualHorizon:
    heights: np.ndarray  # (W,) boundary row per column
    rows: np.ndarray  # pixel set, walked left border -> boundary -> right border
    cols: np.ndarray
    dims: ImageDims

    def __len__(self) -> int:
        return len(self.rows)

    def pixels(self) -> list[tuple[int, int]]:
        return list(zip(self.rows.tolist(), self.cols.tolist()))

    def processed(self) -> np.ndarray:
        h = self.dims.height
        return (np.arange(h)[:, None] <= self.heights[None, :]).astype(np.uint8)


def horizon_from_heights(heights, dims: ImageDims) -> VisualHorizon:
    """Build the contiguous horizon pixel set for given per-column heights."""
    w, h = dims
    heights = np.asarray(heights, dtype=np.int64)
    if heights.shape != (w,):
        raise ValueError(f"expected {w} heights, got shape {heights.shape}")
    if heights.min() < 0 or heights.max() > h - 1:
        raise ValueError("horizon heights outside the image")

    rows: list[np.ndarray] = [np.arange(h - 1, heights[0], -1)]
    cols: list[np.ndarray] = [np.zeros(h - 1 - heights[0], dtype=np.int64)]
    steps = np.diff(heights)
    jumps = np.flatnonzero(np.abs(steps) > 1)
    start = 0
    for c in jumps:
        rows.append(heights[start : c + 1])
        cols.append(np.arange(start, c + 1))
        a, b = heights[c], heights[c + 1]
        if a < b:
            # column c has the higher boundary; bridge down its free side
            bridge, bridge_col = np.arange(a + 1, b), c
        else:
            bridge, bridge_col = np.arange(a - 1, b, -1), c + 1
        rows.append(bridge)
        cols.append(np.full(len(bridge), bridge_col))
        start = c + 1
    rows.append(heights[start:])
    cols.append(np.arange(start, w))
    rows.append(np.arange(heights[-1] + 1, h))
    cols.append(np.full(h - 1 - heights[-1], w - 1))

    r = np.concatenate(rows).astype(np.int64)
    c = np.concatenate(cols).astype(np.int64)
    # a bridge in a border column can repeat border pixels; keep first occurrences in walk order
    _, first = np.unique(r * w + c, return_index=True)
    if len(first) != len(r):
        first.sort()
        r, c = r[first], c[first]
    for arr in (heights, r, c):
        arr.setflags(write=False)
    return VisualHorizon(heights, r, c, dims)


def horizon_heights(nav: np.ndarray) -> np.ndarray:
    """Row of the lowest blocked pixel in each column; 0 for fully free columns."""
    nav = as_navigability(nav)
    blocked = nav[::-1] == BLOCKED
    any_blocked = blocked.any(axis=0)
    lowest = nav.shape[0] - 1 - np.argmax(blocked, axis=0)
    return np.where(any_blocked, lowest, 0).astype(np.int64)


def extract_horizon(nav: np.ndarray) -> tuple[VisualHorizon, np.ndarray]:
    """Return the visual horizon and the processed navigability image."""
    nav = as_navigability(nav)
    horizon = horizon_from_heights(horizon_heights(nav), ImageDims.of(nav))
    return horizon, horizon.processed()
