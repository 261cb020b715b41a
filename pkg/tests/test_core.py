import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from povnav.core import (
    CameraModel,
    ImageDims,
    PixelCoord,
    PlanarPoint,
    as_navigability,
    from_planning,
    pixel_angle,
    to_planning,
    wrap_angle,
)


def test_origin_pixel_maps_to_zero():
    for w, h in [(100, 100), (101, 7), (2, 2)]:
        dims = ImageDims(w, h)
        assert to_planning(PixelCoord(h - 1, w // 2), dims) == (0, 0)


def test_straight_up_pixel():
    assert to_planning(PixelCoord(0, 50), ImageDims(100, 100)) == (99, 0)


def test_bottom_left_pixel():
    # x = 99 - 99, y = 50 - 0
    assert to_planning(PixelCoord(99, 0), ImageDims(100, 100)) == (0, 50)


def test_out_of_bounds_pixel_raises():
    dims = ImageDims(10, 8)
    for p in [(-1, 0), (8, 0), (0, 10), (0, -1)]:
        with pytest.raises(ValueError):
            to_planning(PixelCoord(*p), dims)


@pytest.mark.parametrize("w,h", [(2, 2), (3, 5), (8, 6), (9, 9)])
def test_round_trip_exhaustive(w, h):
    dims = ImageDims(w, h)
    for r in range(h):
        for c in range(w):
            p = to_planning(PixelCoord(r, c), dims)
            assert from_planning(p, dims) == (r, c)
            assert p.x >= 0 and abs(p.y) <= w / 2


def test_pixel_angle_examples():
    assert pixel_angle(PlanarPoint(1, 0)) == 0.0
    assert pixel_angle(PlanarPoint(0, 5)) == pytest.approx(math.pi / 2)
    assert pixel_angle(PlanarPoint(3, 3)) == pytest.approx(math.atan2(3, 3))


def test_pixel_angle_origin_raises():
    with pytest.raises(ValueError):
        pixel_angle(PlanarPoint(0, 0))


@given(st.integers(-500, 500), st.integers(1, 500))
def test_pixel_angle_antisymmetric(x, y):
    assert pixel_angle(PlanarPoint(x, -y)) == pytest.approx(-pixel_angle(PlanarPoint(x, y)))


@given(st.integers(0, 300), st.integers(-300, 300))
def test_pixel_angle_range(x, y):
    if x == 0 and y == 0:
        return
    a = pixel_angle(PlanarPoint(x, y))
    assert -math.pi / 2 <= a <= math.pi / 2


@given(st.floats(-50, 50, allow_nan=False))
def test_wrap_angle_range(a):
    wrapped = wrap_angle(a)
    assert -math.pi <= wrapped < math.pi
    assert math.isclose(math.cos(wrapped), math.cos(a), abs_tol=1e-9)


def test_dims_validation():
    with pytest.raises(ValueError):
        ImageDims(1, 5).validate()
    with pytest.raises(ValueError):
        as_navigability(np.zeros((1, 1)))
    with pytest.raises(ValueError):
        as_navigability(np.full((3, 3), 2))
    with pytest.raises(ValueError):
        as_navigability(np.zeros(5))
    assert as_navigability(np.zeros((3, 3), dtype=bool)).dtype == np.uint8


def test_default_camera_scales_with_width():
    cam = CameraModel.default(ImageDims(320, 240))
    assert cam.focal_px == pytest.approx(150.0)
    assert (cam.principal_row, cam.principal_col) == (119.5, 159.5)
    with pytest.raises(ValueError):
        CameraModel(0.0, 1, 1, 0.5).validate()
