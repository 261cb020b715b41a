"""2.5D simulated world: unicycle robot, extruded obstacles, pedestrians and a ray-cast camera."""

from ..core import Pose2D
from .pedestrians import SocialForceParams, step_pedestrians
from .render import MAX_RANGE_M, ground_point, render_camera
from .world import (
    PEDESTRIAN_MAX_SPEED,
    Cylinder,
    GroundRegion,
    Pedestrian,
    Wall,
    World,
    check_collision,
    clearance,
    step_unicycle,
)
from .worldfile import WorldFileError, dump_world, load_world, parse_world

__all__ = [
    "Pose2D", "SocialForceParams", "step_pedestrians", "MAX_RANGE_M", "ground_point", "render_camera",
    "PEDESTRIAN_MAX_SPEED", "Cylinder", "GroundRegion", "Pedestrian", "Wall", "World", "check_collision",
    "clearance", "step_unicycle", "WorldFileError", "dump_world", "load_world", "parse_world",
]
