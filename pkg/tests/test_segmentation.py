import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from povnav.core import CameraModel, ImageDims
from povnav.pnm import read_depth_pgm, read_pnm, write_depth_pgm, write_pgm, write_ppm
from povnav.segmentation import (
    DEFAULT_TABLE,
    NavigabilityTable,
    SemanticClass,
    classes_to_navigability,
    depth_to_navigability,
    inject_noise,
    normals_to_navigability,
    postprocess_navigability,
    surface_normals,
)
from povnav.simworld import Pose2D, Wall, World, render_camera

from .conftest import bottom_flood_fill

nav_images = hnp.arrays(np.uint8, hnp.array_shapes(min_dims=2, max_dims=2, min_side=2, max_side=12), elements=st.integers(0, 1))


# ---- surface normals -----------------------------------------------------


def _angle_to_up(n):
    return np.degrees(np.arccos(np.clip(n[..., 2], -1, 1)))


def test_flat_ground_normals_point_up():
    dims = ImageDims(160, 120)
    cam = CameraModel.default(dims)
    _, depth = render_camera(World(), Pose2D(0, 0, 0), cam, dims)
    n = surface_normals(depth, cam)
    ground = np.zeros(depth.shape, dtype=bool)
    # ground pixels whose upper and left neighbours also have a return
    ground[1:, 1:] = (depth[1:, 1:] > 0) & (depth[:-1, 1:] > 0) & (depth[1:, :-1] > 0)
    ok = np.isfinite(n[..., 0]) & (_angle_to_up(n) <= 5.0)
    assert ok[ground].mean() >= 0.99


def test_frontal_wall_normals_are_horizontal_backward():
    dims = ImageDims(64, 48)
    cam = CameraModel.default(dims)
    depth = np.full((48, 64), 4.0)
    n = surface_normals(depth, cam)[1:, 1:]
    # camera backward axis in the world frame is (-1, 0, 0)
    cosang = -n[..., 0]
    assert np.all(np.degrees(np.arccos(np.clip(cosang, -1, 1))) <= 5.0)
    assert np.allclose(np.linalg.norm(n, axis=-1), 1.0, atol=1e-6)


def test_normals_reject_tiny_and_negative():
    cam = CameraModel.default()
    with pytest.raises(ValueError):
        surface_normals(np.ones((1, 1)), cam)
    with pytest.raises(ValueError):
        surface_normals(-np.ones((3, 3)), cam)


def test_invalid_neighbours_give_sentinel():
    cam = CameraModel.default(ImageDims(8, 8))
    depth = np.full((8, 8), 3.0)
    depth[4, 4] = 0.0
    n = surface_normals(depth, cam)
    assert np.isnan(n[0]).all() and np.isnan(n[:, 0]).all()
    for r, c in [(4, 4), (5, 4), (4, 5)]:
        assert np.isnan(n[r, c]).all()
    assert np.isfinite(n[6, 6]).all()


def _tilted(deg):
    a = math.radians(deg)
    return np.array([[[math.sin(a), 0.0, math.cos(a)]]])


def test_normals_to_navigability_examples():
    assert normals_to_navigability(_tilted(0.0), 20)[0, 0] == 0
    assert normals_to_navigability(_tilted(90.0), 20)[0, 0] == 1
    assert normals_to_navigability(_tilted(19.0), 20)[0, 0] == 0
    assert normals_to_navigability(_tilted(21.0), 20)[0, 0] == 1
    assert normals_to_navigability(np.full((1, 1, 3), np.nan), 20)[0, 0] == 1
    for bad in (0.0, 90.0, -5.0):
        with pytest.raises(ValueError):
            normals_to_navigability(_tilted(0.0), bad)


@given(st.floats(0, 180), st.floats(0.5, 89.5), st.floats(0.5, 89.5))
def test_normals_tolerance_monotone(tilt, t1, t2):
    lo, hi = min(t1, t2), max(t1, t2)
    n = _tilted(tilt)
    if normals_to_navigability(n, lo)[0, 0] == 0:
        assert normals_to_navigability(n, hi)[0, 0] == 0


def test_depth_pipeline_blocks_wall():
    dims = ImageDims(96, 72)
    cam = CameraModel.default(dims)
    world = World(walls=[Wall(3.0, -5.0, 3.5, 5.0)])
    _, depth = render_camera(world, Pose2D(0, 0, 0), cam, dims)
    nav = depth_to_navigability(depth, cam)
    mid = int(cam.principal_row)
    assert nav[mid - 3 : mid + 3, 10:-10].all()  # wall face
    assert (nav[-2, 10:-10] == 0).all()  # ground in front of it


# ---- semantic classes ----------------------------------------------------


def test_default_class_table():
    seg = np.array([[SemanticClass.GRASS, SemanticClass.TRAIL, SemanticClass.ASPHALT],
                    [SemanticClass.SKY, SemanticClass.TREE, SemanticClass.BUILDING]])
    assert classes_to_navigability(seg).tolist() == [[0, 0, 0], [1, 1, 1]]


def test_single_navigable_class_gives_all_zero():
    assert not classes_to_navigability(np.full((4, 5), SemanticClass.TRAIL)).any()


def test_unknown_class_uses_default():
    seg = np.array([[0, 42]])
    assert classes_to_navigability(seg).tolist() == [[0, 1]]
    open_table = NavigabilityTable(DEFAULT_TABLE.classes, default=0)
    assert classes_to_navigability(seg, open_table).tolist() == [[0, 0]]


def test_table_validation():
    with pytest.raises(ValueError):
        NavigabilityTable({0: 2})
    with pytest.raises(ValueError):
        NavigabilityTable({-1: 0})


@settings(max_examples=50)
@given(st.permutations(list(range(10))), st.data())
def test_class_permutation_commutes(perm, data):
    seg = data.draw(hnp.arrays(np.int64, (5, 6), elements=st.integers(0, 9)))
    flags = data.draw(st.lists(st.integers(0, 1), min_size=10, max_size=10))
    table = NavigabilityTable(dict(enumerate(flags)))
    perm = np.array(perm)
    permuted = NavigabilityTable({int(perm[k]): v for k, v in enumerate(flags)})
    assert np.array_equal(classes_to_navigability(seg, table), classes_to_navigability(perm[seg], permuted))


# ---- post-processing -----------------------------------------------------


def test_enclosed_island_is_blocked():
    nav = np.ones((9, 9), dtype=np.uint8)
    nav[2:5, 3:6] = 0
    nav[6:, :] = 0
    out = postprocess_navigability(nav)
    assert out[2:5, 3:6].all()
    assert not out[6:].any()


def test_all_navigable_unchanged():
    nav = np.zeros((6, 7), dtype=np.uint8)
    assert np.array_equal(postprocess_navigability(nav), nav)


def test_corridor_touching_bottom_preserved():
    nav = np.ones((8, 8), dtype=np.uint8)
    nav[:, 3:5] = 0
    assert np.array_equal(postprocess_navigability(nav), nav)


@given(nav_images)
def test_postprocess_matches_flood_fill(nav):
    out = postprocess_navigability(nav)
    assert np.array_equal(out, bottom_flood_fill(nav))
    assert np.all(out >= nav)
    assert np.array_equal(postprocess_navigability(out), out)


def test_inject_noise():
    rng = np.random.default_rng(0)
    nav = np.zeros((40, 50), dtype=np.uint8)
    assert np.array_equal(inject_noise(nav, rng), nav)
    flipped = inject_noise(nav, rng, flip_prob=1.0)
    assert flipped.all()
    nav[:10] = 1
    jittered = inject_noise(nav, rng, jitter_rows=2)
    assert set(np.unique(jittered)) <= {0, 1}
    assert jittered[12:].sum() == 0 and jittered[:8].all()
    with pytest.raises(ValueError):
        inject_noise(nav, rng, flip_prob=1.5)


# ---- PNM I/O -------------------------------------------------------------


def test_pgm_round_trip(tmp_path):
    img = np.arange(12, dtype=np.uint8).reshape(3, 4)
    write_pgm(tmp_path / "a.pgm", img)
    assert np.array_equal(read_pnm(tmp_path / "a.pgm"), img)
    raw = (tmp_path / "a.pgm").read_bytes()
    assert raw.startswith(b"P5\n4 3\n255\n")


def test_ppm_round_trip(tmp_path):
    rgb = np.random.default_rng(1).integers(0, 256, (5, 6, 3)).astype(np.uint8)
    write_ppm(tmp_path / "a.ppm", rgb)
    assert np.array_equal(read_pnm(tmp_path / "a.ppm"), rgb)


def test_depth_pgm_millimetres(tmp_path):
    depth = np.array([[0.0, 1.2345], [10.0, 65.5]])
    write_depth_pgm(tmp_path / "d.pgm", depth)
    back = read_depth_pgm(tmp_path / "d.pgm")
    assert np.allclose(back, [[0.0, 1.234], [10.0, 65.5]], atol=1e-3)
    with pytest.raises(ValueError):
        write_depth_pgm(tmp_path / "e.pgm", np.array([[70.0, 0.0]]))
