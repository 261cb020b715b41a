"""Frame dumps: semantic image with horizon, path, POG and HOG drawn on top."""

from __future__ import annotations

import os

import numpy as np

from ..pnm import write_ppm
from ..segmentation import N_CLASSES, SemanticClass
from .planner import Diagnostics

PALETTE = np.zeros((256, 3), dtype=np.uint8)
PALETTE[: N_CLASSES] = [
    (70, 140, 60),  # grass
    (170, 140, 90),  # trail
    (110, 110, 110),  # asphalt
    (150, 190, 230),  # sky
    (30, 80, 30),  # tree
    (140, 70, 60),  # building
    (220, 60, 160),  # person
    (90, 80, 70),  # rock
]
assert len(SemanticClass) == N_CLASSES

HORIZON_RGB = (255, 230, 0)
PATH_RGB = (0, 255, 0)
POG_RGB = (0, 80, 255)
HOG_RGB = (255, 0, 0)


def _disc(img: np.ndarray, row: int, col: int, radius: int, rgb) -> None:
    h, w = img.shape[:2]
    r0, r1 = max(row - radius, 0), min(row + radius + 1, h)
    c0, c1 = max(col - radius, 0), min(col + radius + 1, w)
    rr, cc = np.mgrid[r0:r1, c0:c1]
    mask = (rr - row) ** 2 + (cc - col) ** 2 <= radius * radius
    img[rr[mask], cc[mask]] = rgb


def overlay(semantic: np.ndarray, diag: Diagnostics | None) -> np.ndarray:
    img = PALETTE[semantic]
    if diag is None:
        return img
    radius = max(2, semantic.shape[0] // 80)
    if diag.horizon is not None:
        img[diag.horizon.rows, diag.horizon.cols] = HORIZON_RGB
    if diag.path is not None:
        img[diag.path.rows, diag.path.cols] = PATH_RGB
    _disc(img, *diag.pog, radius, POG_RGB)
    if diag.hog is not None:
        _disc(img, *diag.hog.pixel, radius, HOG_RGB)
    return img


class FrameWriter:
    """Frame hook that writes every ``every``-th frame as a numbered PPM."""

    def __init__(self, directory: str | os.PathLike, every: int = 1, prefix: str = "frame"):
        if every < 1:
            raise ValueError("every must be >= 1")
        self.directory, self.every, self.prefix = os.fspath(directory), every, prefix
        os.makedirs(self.directory, exist_ok=True)
        self.written: list[str] = []

    def __call__(self, index: int, semantic: np.ndarray, pose, diag: Diagnostics) -> None:
        if index % self.every:
            return
        path = os.path.join(self.directory, f"{self.prefix}_{index:05d}.ppm")
        write_ppm(path, overlay(semantic, diag))
        self.written.append(path)
