import io
import math
from dataclasses import replace

import numpy as np
import pytest

from povnav.core import CameraModel, ImageDims, Pose2D
from povnav.goalproj import project_goal_in_view
from povnav.harness import (
    ConfigError,
    EnvironmentSpec,
    EpisodeConfig,
    EpisodeResult,
    HorizonFilter,
    Mode,
    Planner,
    PlannerParams,
    build_environment,
    plan_step,
    run_episode,
)
from povnav.harness import suite as S
from povnav.harness.builtin import builtin_suite
from povnav.segmentation import SemanticClass
from povnav.servo import ControlCommand
from povnav.simworld import Cylinder, World, check_collision, render_camera

DIMS = ImageDims(320, 240)
CAM = CameraModel.default(DIMS)


def _frame(world, pose=Pose2D(0, 0, 0)):
    return render_camera(world, pose, CAM, DIMS)[0]


# ---- plan_step -----------------------------------------------------------


def test_free_world_goal_ahead_full_mode():
    sem = _frame(World())
    params = PlannerParams()
    prev = ControlCommand()
    for _ in range(20):
        prev, diag = plan_step(sem, 0.0, Mode.FULL, params, CAM, prev, 0.1)
        assert prev.v > 0 and abs(prev.omega) < 0.05
    assert diag.path is not None and diag.hog is not None and diag.lam > 0


def test_wall_filling_lower_image_backs_up():
    sem = np.full((DIMS.height, DIMS.width), SemanticClass.SKY, dtype=np.uint8)
    sem[DIMS.height // 2 :] = SemanticClass.BUILDING
    cmd, diag = plan_step(sem, 0.0, Mode.FULL, PlannerParams(), CAM, ControlCommand(), 0.1)
    assert diag.lam == 0.0 and cmd.v < 0


def test_pog_only_ignores_obstacles():
    free = _frame(World())
    blocked = _frame(World(obstacles=[Cylinder(2.0, 0.0, 0.5)]))
    assert (free != blocked).any()
    for theta in (0.0, 0.7, -2.5):
        a = plan_step(free, theta, Mode.POG_ONLY, PlannerParams(), CAM)
        b = plan_step(blocked, theta, Mode.POG_ONLY, PlannerParams(), CAM)
        assert a[0] == b[0] and b[1].horizon is None


def test_pog_hog_has_no_path():
    sem = _frame(World(obstacles=[Cylinder(3.0, 0.4, 0.5)]))
    _, diag = plan_step(sem, 0.0, Mode.POG_HOG, PlannerParams(), CAM)
    assert diag.path is None and diag.hog is not None and math.isfinite(diag.lam)


def test_in_view_goal_replaces_border_pog():
    px = project_goal_in_view(Pose2D(0, 0, 0), (5.0, 0.0), CAM, DIMS)
    assert px is not None
    _, diag = plan_step(_frame(World()), 0.0, Mode.FULL, PlannerParams(), CAM, goal_pixel=px)
    assert tuple(diag.pog) == tuple(px)
    _, diag = plan_step(_frame(World()), 0.0, Mode.FULL, replace(PlannerParams(), in_view_goal=False), CAM,
                        goal_pixel=px)
    assert diag.pog.row == 0


def test_planner_params_validation():
    with pytest.raises(ValueError):
        PlannerParams(k_omega=0.0)
    with pytest.raises(ValueError):
        PlannerParams(lambda_star_frac=1.5)
    with pytest.raises(ValueError):
        plan_step(_frame(World()), 0.0, "sideways", PlannerParams(), CAM)


def test_planner_carries_previous_command():
    planner = Planner(Mode.FULL, PlannerParams(), CAM, 0.1)
    sem = _frame(World())
    cmds = [planner.step(sem, 0.0)[0] for _ in range(5)]
    assert all(b.v - a.v <= PlannerParams().limits.dv_max * 0.1 + 1e-12 for a, b in zip(cmds, cmds[1:]))
    planner.reset()
    assert planner.prev == ControlCommand()


def test_horizon_filter_caps_changes():
    f = HorizonFilter(window=3)
    assert f(np.array([10, 10])).tolist() == [10, 10]
    assert f(np.array([12, 10])).tolist() == [12, 10]  # no history yet: passes through
    out = f(np.array([30, 10]))
    assert out.tolist() == [14, 10]  # capped at the mean recent change (2)
    f.reset()
    assert f(np.array([1, 1])).tolist() == [1, 1]


# ---- environments --------------------------------------------------------


def test_grid_field_lattice_spacing():
    for gap in (3.0, 1.0):
        world, task = build_environment(EnvironmentSpec("grid_field", spacing_m=gap, seed=4))
        xs = sorted({o.x for o in world.obstacles})
        ys = sorted({o.y for o in world.obstacles})
        pitch = gap + 2 * 0.25
        assert np.allclose(np.diff(xs), pitch) and np.allclose(np.diff(ys), pitch)
        assert task.distance == pytest.approx(32.0)
        assert not check_collision(world, task.start, 0.3)


def test_corridor_with_pedestrians():
    world, task = build_environment(EnvironmentSpec("corridor", pedestrians=10, seed=2))
    assert len(world.agents) == 10 and len(world.walls) == 4
    assert all(0 < a.position[0] < 30 and abs(a.position[1]) < 3 for a in world.agents)
    assert 0 < task.start.x < task.goal[0] < 30


def test_l_corridor_and_free():
    world, task = build_environment(EnvironmentSpec("l_corridor", pedestrians=5, seed=1))
    assert len(world.agents) == 5 and task.goal[1] > 20
    world, task = build_environment(EnvironmentSpec("free", seed=3))
    assert not world.obstacles and not world.walls and task.distance == pytest.approx(32.0)


@pytest.mark.parametrize("kw", [dict(kind="maze"), dict(spacing_m=0.0), dict(pedestrians=-1),
                                dict(corridor_width_m=1.0)])
def test_environment_validation(kw):
    with pytest.raises(ConfigError):
        EnvironmentSpec(**kw)


def test_environment_seeded():
    a = build_environment(EnvironmentSpec("corridor", pedestrians=6, seed=7))
    b = build_environment(EnvironmentSpec("corridor", pedestrians=6, seed=7))
    assert a[1] == b[1]
    assert all(np.array_equal(p.position, q.position) for p, q in zip(a[0].agents, b[0].agents))


# ---- episodes ------------------------------------------------------------


def test_free_episode_reaches_goal_32m():
    res = run_episode(World(), EpisodeConfig(Pose2D(0, 0, 0), (32.0, 0.0), dims=DIMS))
    assert res.success and not res.collision and not res.timeout
    assert res.path_length_m == pytest.approx(32.0, rel=0.05)
    assert res.final_distance_m <= 0.5
    assert len(res.latencies_s) == len(res.commands)


def test_pog_only_collides_in_field():
    suite = builtin_suite("ablation")
    world, task = build_environment(EnvironmentSpec("grid_field", spacing_m=2.0, seed=0))
    res = run_episode(world, S.episode_config(suite, task, Mode.POG_ONLY))
    assert res.collision and not res.success


def test_episode_determinism_and_success_invariant():
    world, task = build_environment(EnvironmentSpec("corridor", pedestrians=6, seed=3))
    cfg = EpisodeConfig(task.start, task.goal, Mode.FULL, t_max=15.0, dims=ImageDims(160, 120))
    a, b = run_episode(world, cfg), run_episode(world, cfg)
    assert a == b  # latencies are excluded from equality
    assert [tuple(p) for p in a.trajectory] == [tuple(p) for p in b.trajectory]
    assert sum((a.success, a.collision, a.timeout)) == 1
    if a.success:
        assert a.final_distance_m <= cfg.epsilon


def test_success_implies_no_collision_on_trajectory():
    suite = builtin_suite("density")
    for seed in range(2):
        world, task = build_environment(EnvironmentSpec("grid_field", spacing_m=3.0, seed=seed))
        res = run_episode(world, S.episode_config(suite, task, Mode.FULL))
        if res.success:
            assert res.final_distance_m <= suite.epsilon
            assert not any(check_collision(world, p, 0.3) for p in res.trajectory)


def test_episode_leaves_world_untouched():
    world, task = build_environment(EnvironmentSpec("corridor", pedestrians=3, seed=0))
    before = [a.position.copy() for a in world.agents]
    run_episode(world, EpisodeConfig(task.start, task.goal, t_max=1.0, dims=ImageDims(160, 120)))
    assert all(np.array_equal(p, a.position) for p, a in zip(before, world.agents))


def test_frame_hook_called_each_control_cycle():
    seen = []
    cfg = EpisodeConfig(Pose2D(0, 0, 0), (32.0, 0.0), t_max=1.0, dims=ImageDims(160, 120))
    run_episode(World(), cfg, frame_hook=lambda i, sem, pose, diag: seen.append(i))
    assert seen == list(range(10))


def test_episode_config_validation():
    with pytest.raises(ValueError):
        EpisodeConfig(Pose2D(0, 0, 0), (1, 1), epsilon=0.0)
    with pytest.raises(ValueError):
        EpisodeConfig(Pose2D(0, 0, 0), (1, 1), t_max=-1.0)


# ---- suites and reports --------------------------------------------------


def test_empty_suite_is_parse_error():
    with pytest.raises(S.SuiteError, match="empty suite"):
        S.parse_suite("", source="empty.ini")
    with pytest.raises(S.SuiteError, match=r"x\.ini:3: unknown suite key 'colour'"):
        S.parse_suite("[suite]\nname = a\ncolour = red\n[scenario s]\nkind = free\n", source="x.ini")
    with pytest.raises(S.SuiteError, match="no \\[scenario"):
        S.parse_suite("[suite]\nname = a\n")
    with pytest.raises(S.SuiteError, match=r":4: unknown environment kind"):
        S.parse_suite("[suite]\nname = a\n\n[scenario s]\nkind = maze\n")


def test_parse_seeds_and_resolution():
    assert S.parse_seeds("0-3, 7") == (0, 1, 2, 3, 7)
    assert S.parse_resolution("640x480") == ImageDims(640, 480)
    with pytest.raises(ValueError):
        S.parse_seeds("5-2")


def test_builtin_suites():
    abl = builtin_suite("ablation")
    assert abl.n_episodes == 180 and len(abl.scenarios) == 3 and len(abl.modes) == 3
    assert abl.dims == ImageDims(320, 240)
    dens = builtin_suite("density")
    assert [s.env.spacing_m for s in dens.scenarios] == [3.0, 2.5, 2.0, 1.5, 1.0]
    with pytest.raises(KeyError):
        builtin_suite("nope")


def _stub_result(success):
    return EpisodeResult(success, not success, False, 32.0, 30.0, 0.1 if success else 5.0,
                         [Pose2D(0, 0, 0)], [], latencies_s=[0.001, 0.002])


def test_ablation_report_row_counts(monkeypatch):
    monkeypatch.setattr(S, "run_episode", lambda world, cfg: _stub_result(cfg.mode is not Mode.POG_ONLY))
    recs = S.run_suite(builtin_suite("ablation"), workers=1)
    buf = io.StringIO()
    S.write_report(recs, "ablation", buf)
    rows = S.read_report(buf.getvalue())
    assert sum(r["row_type"] == "episode" for r in rows) == 180
    agg = [r for r in rows if r["row_type"] == "aggregate"]
    assert len(agg) == 9
    rates = {(r["scenario"], r["mode"]): float(r["success_rate"]) for r in agg}
    assert rates[("free", "pog_only")] == 0.0 and rates[("field2", "full")] == 1.0
    assert all(r["schema_version"] == str(S.CSV_SCHEMA_VERSION) for r in rows)
    p50 = float(agg[0]["latency_p50_ms"])
    assert p50 == pytest.approx(1.5)


def test_report_schema_check(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text(",".join(S.CSV_COLUMNS) + "\n" + "99" + "," * (len(S.CSV_COLUMNS) - 1) + "\n")
    with pytest.raises(ValueError, match="schema"):
        S.read_report(str(path))


def test_small_suite_end_to_end(tmp_path):
    text = ("[suite]\nname = tiny\nmodes = full, pog_only\nseeds = 0-1\nresolution = 160x120\nt_max = 3\n"
            "[planner]\nsafety_margin_m = 0.1\n[scenario open]\nkind = free\n")
    path = tmp_path / "tiny.ini"
    path.write_text(text)
    suite = S.load_suite(path)
    recs = S.run_suite(suite)
    assert len(recs) == 4 and all(r.result.timeout for r in recs)
    assert suite.params.robot.safety_margin_m == 0.1
