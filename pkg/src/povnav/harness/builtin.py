"""Built-in benchmark suites.

All benchmark suites share one planner/camera profile. The library defaults
(narrower camera, 5 cm margin, desired proximity of a quarter image) stall
or clip obstacles in the cylinder fields, so the benchmark profile widens the
camera, enlarges the safety margin and lowers the desired proximity; it is
fixed across every scenario and mode.
"""

from __future__ import annotations

from .suite import Suite, parse_suite

BENCH_PROFILE = """
[planner]
safety_margin_m = 0.3
lambda_star_frac = 0.1
k_v_480 = 0.00625

[camera]
focal_px_640 = 200
height_m = 0.5
"""

ABLATION_SUITE = """
[suite]
name = ablation
modes = pog_only, pog_hog, full
seeds = 0-19
resolution = 320x240
t_max = 90

[scenario free]
kind = free

[scenario field2]
kind = grid_field
spacing_m = 2.0

[scenario corridor6]
kind = corridor
pedestrians = 6
""" + BENCH_PROFILE

DENSITY_SUITE = """
[suite]
name = density
modes = full
seeds = 0-19
resolution = 320x240
t_max = 90

[scenario env1]
kind = grid_field
spacing_m = 3.0

[scenario env2]
kind = grid_field
spacing_m = 2.5

[scenario env3]
kind = grid_field
spacing_m = 2.0

[scenario env4]
kind = grid_field
spacing_m = 1.5

[scenario env5]
kind = grid_field
spacing_m = 1.0
""" + BENCH_PROFILE

BUILTIN = {"ablation": ABLATION_SUITE, "density": DENSITY_SUITE}


def builtin_suite(name: str) -> Suite:
    try:
        return parse_suite(BUILTIN[name], source=f"<builtin:{name}>")
    except KeyError:
        raise KeyError(f"unknown built-in suite {name!r}; choose from {sorted(BUILTIN)}") from None
