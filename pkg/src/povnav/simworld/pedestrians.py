"""Simplified social-force pedestrians: goal drive plus exponential repulsion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .world import PEDESTRIAN_MAX_SPEED, Pedestrian, World


@dataclass(frozen=True)
class SocialForceParams:
    k_goal: float = 2.0  # 1/s, relaxation toward the desired velocity
    k_rep: float = 2.0  # m/s^2
    sigma: float = 0.3  # m, repulsion range
    max_speed: float = PEDESTRIAN_MAX_SPEED
    arrive_radius: float = 0.2  # m, drive switches off inside this radius
    cutoff: float = 3.0  # m, neighbors farther than this (surface gap) are ignored

    def __post_init__(self):
        if min(self.k_goal, self.k_rep, self.sigma, self.max_speed, self.arrive_radius, self.cutoff) <= 0:
            raise ValueError("social force parameters must be positive")


def _repulsion(pos, r_i, others_xy, others_r, params: SocialForceParams) -> np.ndarray:
    if len(others_xy) == 0:
        return np.zeros(2)
    diff = pos[None, :] - others_xy
    dist = np.hypot(diff[:, 0], diff[:, 1])
    near = (dist - r_i - others_r) < params.cutoff
    if not near.any():
        return np.zeros(2)
    diff, dist, rr = diff[near], dist[near], others_r[near]
    # coincident centers push along +x so the result stays finite
    safe = np.maximum(dist, 1e-9)
    n = np.where(dist[:, None] > 1e-9, diff / safe[:, None], np.array([1.0, 0.0]))
    mag = params.k_rep * np.exp((r_i + rr - dist) / params.sigma)
    return (mag[:, None] * n).sum(axis=0)


def step_pedestrians(
    agents: list[Pedestrian],
    world: World,
    dt: float,
    robot: tuple[float, float, float] | None = None,
    params: SocialForceParams = SocialForceParams(),
) -> list[Pedestrian]:
    """Advance every agent by one Euler step; returns new agent objects.

    ``robot`` is ``(x, y, radius)`` and is treated as one more neighbor.
    Static cylinders and walls repel as well (walls via their nearest point).
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    n = len(agents)
    if n == 0:
        return []
    pos = np.array([a.position for a in agents]).reshape(n, 2)
    rad = np.array([a.radius for a in agents])
    static = [(o.x, o.y, o.radius) for o in world.obstacles]
    if robot is not None:
        static.append(tuple(robot))
    static_arr = np.array(static, dtype=float).reshape(-1, 3)

    out = []
    for i, a in enumerate(agents):
        a = a.copy()
        to_goal = a.goal - a.position
        dist = float(np.hypot(*to_goal))
        if dist <= params.arrive_radius and a.home is not None:
            a.goal, a.home = a.home, a.goal
            to_goal = a.goal - a.position
            dist = float(np.hypot(*to_goal))
        desired = a.v_des * to_goal / dist if dist > params.arrive_radius else np.zeros(2)
        acc = params.k_goal * (desired - a.velocity)

        others = np.arange(n) != i
        acc += _repulsion(a.position, a.radius, pos[others], rad[others], params)
        acc += _repulsion(a.position, a.radius, static_arr[:, :2], static_arr[:, 2], params)
        if world.walls:
            pts = np.array([w.nearest_point(*a.position) for w in world.walls])
            acc += _repulsion(a.position, a.radius, pts, np.zeros(len(pts)), params)

        vel = a.velocity + acc * dt
        speed = float(np.hypot(*vel))
        if speed > params.max_speed:
            vel *= params.max_speed / speed
        a.velocity = vel
        a.position = a.position + vel * dt
        out.append(a)
    return out
