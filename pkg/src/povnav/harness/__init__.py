"""Benchmark environments, closed-loop episodes and suites."""

from .environments import ConfigError, EnvironmentSpec, Task, build_environment
from .episode import EpisodeConfig, EpisodeResult, run_episode
from .planner import Diagnostics, HorizonFilter, Mode, Planner, PlannerParams, plan_step

__all__ = [
    "ConfigError", "EnvironmentSpec", "Task", "build_environment", "EpisodeConfig", "EpisodeResult",
    "run_episode", "Diagnostics", "HorizonFilter", "Mode", "Planner", "PlannerParams", "plan_step",
]
