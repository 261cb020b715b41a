"""Horizon optic goal (HOG) selection by weighted-sum scalarization.

Two objectives are traded off for every candidate pixel ``(x, y)`` in the
planning frame:

* navigation cost: angular deviation from the goal bearing, divided by pi;
* exploration cost: negative distance from the origin, divided by the image
  diagonal.

Only horizon pixels are enumerated. A pixel strictly inside the free region
can be pushed outward along its own bearing, keeping its navigation cost and
lowering its exploration cost, so the weighted optimum sits on the horizon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import ImageDims, PixelCoord, PlanarPoint, planning_arrays, wrap_angle
from .horizon import VisualHorizon


class ObjectiveWeights(NamedTuple):
    w1: float = 0.7  # navigation
    w2: float = 0.3  # exploration

    def validate(self) -> "ObjectiveWeights":
        if not (self.w1 > 0 and self.w2 > 0):
            raise ValueError("objective weights must be positive")
        return self


@dataclass(frozen=True)
class Hog:
    pixel: PixelCoord
    cost: float
    c_nav: float
    c_exp: float


def objective_terms(x, y, theta_g: float, dims: ImageDims):
    """Normalized (c_nav, c_exp) for planning-frame coordinates.

    The origin has no bearing of its own; it is scored along the heading
    (bearing 0), which keeps it dominated by the straight-ahead horizon pixel
    unless that pixel is the origin itself.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c_nav = np.abs(wrap_angle(np.arctan2(y, x) - theta_g)) / math.pi
    c_exp = -np.hypot(x, y) / dims.diagonal
    return c_nav, c_exp


def scalarized_cost(p: PlanarPoint, theta_g: float, weights: ObjectiveWeights, dims: ImageDims) -> float:
    weights.validate()
    c_nav, c_exp = objective_terms(p[0], p[1], theta_g, dims)
    return float(weights.w1 * c_nav + weights.w2 * c_exp)


def select_hog(
    horizon: VisualHorizon,
    theta_g: float,
    weights: ObjectiveWeights = ObjectiveWeights(),
) -> Hog:
    weights.validate()
    if len(horizon) == 0:
        raise ValueError("empty horizon")
    dims = horizon.dims
    x, y = planning_arrays(horizon.rows, horizon.cols, dims)
    c_nav, c_exp = objective_terms(x, y, theta_g, dims)
    cost = weights.w1 * c_nav + weights.w2 * c_exp
    # primary key last: cost, then c_nav, then column
    best = np.lexsort((horizon.cols, c_nav, cost))[0]
    return Hog(
        PixelCoord(int(horizon.rows[best]), int(horizon.cols[best])),
        float(cost[best]),
        float(c_nav[best]),
        float(c_exp[best]),
    )
