"""Shared random-image generators and brute-force oracles."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import ndimage


def bernoulli_image(rng: np.random.Generator, w: int, h: int, density: float) -> np.ndarray:
    return (rng.random((h, w)) < density).astype(np.uint8)


def blob_image(rng: np.random.Generator, w: int, h: int, n_blobs: int | None = None) -> np.ndarray:
    """A few filled ellipses plus a blocked band near the top, like a rendered scene."""
    nav = np.zeros((h, w), dtype=np.uint8)
    rr, cc = np.mgrid[0:h, 0:w]
    k = int(rng.integers(0, 6)) if n_blobs is None else n_blobs
    for _ in range(k):
        r0, c0 = rng.uniform(0, h), rng.uniform(0, w)
        a, b = rng.uniform(1, h / 3), rng.uniform(1, w / 4)
        nav[((rr - r0) / a) ** 2 + ((cc - c0) / b) ** 2 <= 1] = 1
    nav[: int(rng.integers(0, h // 2 + 1))] = 1
    return nav


def random_image(rng: np.random.Generator, w: int, h: int, i: int) -> np.ndarray:
    """Alternate between i.i.d. noise (density U(0, 0.5)) and blob scenes."""
    if i % 2 == 0:
        return bernoulli_image(rng, w, h, rng.uniform(0.0, 0.5))
    return blob_image(rng, w, h)


def column_scan_heights(nav: np.ndarray) -> np.ndarray:
    """Per-column horizon by an explicit bottom-up loop."""
    h, w = nav.shape
    out = np.zeros(w, dtype=int)
    for c in range(w):
        r = h - 1
        while r >= 0 and nav[r, c] == 0:
            r -= 1
        out[c] = max(r, 0)
    return out


def bottom_flood_fill(nav: np.ndarray) -> np.ndarray:
    """Navigable pixels 4-connected to the bottom row, by BFS."""
    h, w = nav.shape
    seen = np.zeros_like(nav, dtype=bool)
    stack = [(h - 1, c) for c in range(w) if nav[h - 1, c] == 0]
    for p in stack:
        seen[p] = True
    while stack:
        r, c = stack.pop()
        for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            rr, cc = r + dr, c + dc
            if 0 <= rr < h and 0 <= cc < w and not seen[rr, cc] and nav[rr, cc] == 0:
                seen[rr, cc] = True
                stack.append((rr, cc))
    return np.where(seen, 0, 1).astype(np.uint8)


def is_eight_connected(rows, cols) -> bool:
    mask = np.zeros((max(rows) + 1, max(cols) + 1), dtype=bool)
    mask[rows, cols] = True
    _, n = ndimage.label(mask, structure=np.ones((3, 3), dtype=bool))
    return n == 1


def brute_force_costs(heights: np.ndarray, w: int, h: int, theta_g: float, w1: float, w2: float):
    """Scalarized cost of every pixel on or below the horizon (the search space G).

    Returns (rows, cols, c_nav, c_exp, cost) over G, with costs from math.atan2.
    The origin pixel is scored along the heading.
    """
    diag = math.hypot(w - 1, h - 1)
    rows, cols, nav_c, exp_c = [], [], [], []
    for c in range(w):
        for r in range(int(heights[c]), h):
            x, y = (h - 1) - r, w // 2 - c
            d = math.atan2(y, x) - theta_g
            d = (d + math.pi) % (2 * math.pi) - math.pi
            rows.append(r)
            cols.append(c)
            nav_c.append(abs(d) / math.pi)
            exp_c.append(-math.hypot(x, y) / diag)
    nav_c, exp_c = np.array(nav_c), np.array(exp_c)
    return np.array(rows), np.array(cols), nav_c, exp_c, w1 * nav_c + w2 * exp_c


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
