import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strokepaint.align import (BBox, NoForegroundError, bbox_from_mask, grid_from_normalized_affine,
                               grid_from_pixel_affine, normalized_affine, pixel_affine, resample,
                               zoom, zoom_normalized)
from strokepaint.checks import crop_resize, random_bbox
from strokepaint.stroke import CanvasDims

D64 = CanvasDims(64, 64)


def test_pixel_affine_examples():
    assert np.array_equal(pixel_affine(BBox(0, 0, 64, 48), CanvasDims(48, 64)),
                          np.array([[1, 0, 0], [0, 1, 0]]).T)
    A = pixel_affine(BBox(16, 16, 32, 32), D64)
    assert A.shape == (3, 2)
    assert np.array_equal(A.T, [[2, 0, -32], [0, 2, -32]])
    with pytest.raises(ValueError):
        pixel_affine(BBox(0, 0, 0, 10), D64)
    with pytest.raises(ValueError):
        pixel_affine(BBox(40, 0, 30, 10), D64)


def test_normalized_affine_examples():
    assert np.array_equal(normalized_affine((0, 0, 1, 1)), np.array([[1, 0, 0], [0, 1, 0]]).T)
    assert np.allclose(normalized_affine((0.25, 0.25, 0.5, 0.5)).T, [[0.5, 0, 0], [0, 0.5, 0]])
    assert np.allclose(normalized_affine((0.5, 0.5, 0.75, 0.1)).T, [[0.75, 0, 0.75], [0, 0.1, 0.1]])
    with pytest.raises(ValueError):
        normalized_affine((0.1, 0.1, 0.0, 0.5))


def test_full_bbox_identity(rng):
    img = rng.random((40, 56, 3))
    assert np.array_equal(zoom(img, BBox.full(CanvasDims(40, 56))), img)
    seg = rng.random((40, 56))
    assert np.array_equal(zoom(seg, BBox.full(CanvasDims(40, 56))), seg)


def test_constant_image_interior(rng):
    img = np.full((64, 64, 3), 0.37)
    for _ in range(10):
        bb = random_bbox(rng, D64)
        z = zoom(img, bb)
        gx, gy = grid_from_pixel_affine(pixel_affine(bb, D64), D64, D64)
        inside = (gx >= 0) & (gx <= 63) & (gy >= 0) & (gy <= 63)
        assert np.allclose(z[inside], 0.37)


def test_gradient_crop_resize_example():
    yy, xx = np.mgrid[0:64, 0:64]
    img = np.stack([xx / 63.0, yy / 63.0, (xx + yy) / 126.0], axis=-1)
    bb = BBox(16, 16, 32, 32)
    assert np.abs(zoom(img, bb) - crop_resize(img, bb, D64)).max() <= 1e-5


def test_crop_resize_oracle(rng):
    img = rng.random((48, 56, 3))
    dims = CanvasDims(48, 56)
    for _ in range(25):
        bb = random_bbox(rng, dims)
        out = CanvasDims(int(rng.integers(8, 70)), int(rng.integers(8, 70)))
        assert np.abs(zoom(img, bb, out) - crop_resize(img, bb, out)).max() <= 1e-3


def test_conventions_agree(rng):
    dims = CanvasDims(40, 72)
    img = rng.random((40, 72, 3))
    for _ in range(50):
        bb = random_bbox(rng, dims)
        a = zoom(img, bb)
        b = zoom_normalized(img, bb.normalized(dims))
        assert np.abs(a - b).max() <= 1e-5


def test_grids_agree_off_resolution(rng):
    dims, out = CanvasDims(40, 72), CanvasDims(24, 30)
    bb = BBox(5, 7, 33, 20)
    g1 = grid_from_pixel_affine(pixel_affine(bb, dims), dims, out)
    g2 = grid_from_normalized_affine(normalized_affine(bb.normalized(dims)), dims, out)
    assert np.allclose(g1[0], g2[0]) and np.allclose(g1[1], g2[1])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_range_and_determinism(seed):
    r = np.random.default_rng(seed)
    img = r.random((32, 32, 3))
    bb = random_bbox(r, CanvasDims(32, 32))
    z = zoom(img, bb)
    assert z.min() >= 0.0 and z.max() <= 1.0
    assert np.array_equal(z, zoom(img, bb))


def test_resample_2d_and_3d_consistent(rng):
    img = rng.random((20, 20))
    gx, gy = rng.uniform(-1, 20, (2, 7, 9))
    assert np.array_equal(resample(img, gx, gy), resample(img[:, :, None], gx, gy)[:, :, 0])


def test_bbox_from_mask_examples():
    seg = np.zeros((64, 64))
    seg[10:21, 30:41] = 1.0
    assert bbox_from_mask(seg, 0.5, 0.0) == BBox(30, 10, 11, 11)
    assert bbox_from_mask(seg, 0.5, 0.1) == BBox(29, 9, 13, 13)
    with pytest.raises(NoForegroundError, match="no foreground"):
        bbox_from_mask(np.zeros((64, 64)), 0.5)


def test_bbox_from_mask_clips():
    seg = np.zeros((32, 32))
    seg[0:5, 28:32] = 1.0
    bb = bbox_from_mask(seg, 0.5, 1.0)
    assert bb.x >= 0 and bb.y == 0 and bb.x + bb.w == 32
    bb.validate(CanvasDims(32, 32))


def test_bbox_parse():
    assert BBox.parse("1, 2,3,4") == BBox(1, 2, 3, 4)
    with pytest.raises(ValueError):
        BBox.parse("1,2,3")
