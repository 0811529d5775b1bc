"""Affine zoom onto the foreground bounding box.

Two matrix conventions describe the same map:

* ``pixel_affine``: 3x2 matrix taking input pixel coordinates (row vector
  ``[x, y, 1]``) to output-raster coordinates at the input resolution.
* ``normalized_affine``: 3x2 matrix taking output coordinates in ``[-1, 1]``
  to input coordinates in ``[-1, 1]`` (pixel-edge aligned, as in samplers
  with ``align_corners=False``).

Continuous coordinates put pixel ``j`` at ``[j, j + 1)``, center ``j + 0.5``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .stroke import CanvasDims


class NoForegroundError(ValueError):
    pass


@dataclass(frozen=True)
class BBox:
    x: float
    y: float
    w: float
    h: float

    def validate(self, dims: CanvasDims) -> BBox:
        if self.w < 1 or self.h < 1:
            raise ValueError(f"degenerate bounding box {self}")
        if self.x < 0 or self.y < 0 or self.x + self.w > dims.width or self.y + self.h > dims.height:
            raise ValueError(f"bounding box {self} exceeds {dims.height}x{dims.width} image")
        return self

    def normalized(self, dims: CanvasDims) -> tuple[float, float, float, float]:
        return (self.x / dims.width, self.y / dims.height, self.w / dims.width, self.h / dims.height)

    @classmethod
    def full(cls, dims: CanvasDims) -> BBox:
        return cls(0, 0, dims.width, dims.height)

    @classmethod
    def parse(cls, text: str) -> BBox:
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"bbox must be x,y,w,h; got {text!r}")
        return cls(*(int(p) for p in parts))


def pixel_affine(bbox: BBox, dims: CanvasDims) -> np.ndarray:
    bbox.validate(dims)
    W, H = dims.width, dims.height
    return np.array([[W / bbox.w, 0.0, -W * bbox.x / bbox.w],
                     [0.0, H / bbox.h, -H * bbox.y / bbox.h]]).T


def normalized_affine(bbox_norm) -> np.ndarray:
    xn, yn, wn, hn = (float(v) for v in bbox_norm)
    if wn <= 0 or hn <= 0:
        raise ValueError(f"degenerate normalized box {bbox_norm}")
    if not all(0.0 <= v <= 1.0 for v in (xn, yn, wn, hn)):
        raise ValueError(f"normalized box {bbox_norm} outside [0, 1]")
    return np.array([[wn, 0.0, 2 * xn + wn - 1],
                     [0.0, hn, 2 * yn + hn - 1]]).T


def _out_centers(out_dims: CanvasDims):
    jj = np.arange(out_dims.width) + 0.5
    ii = np.arange(out_dims.height) + 0.5
    return np.meshgrid(jj, ii)


def grid_from_pixel_affine(A: np.ndarray, in_dims: CanvasDims, out_dims: CanvasDims):
    """Source sampling grid (pixel-index space) for each output pixel."""
    lin = A[:2, :].T  # [X_out, Y_out]^T = lin @ [x, y]^T + shift
    shift = A[2, :]
    xo, yo = _out_centers(out_dims)
    # output raster is A's target (input resolution) rescaled to out_dims
    xo = xo * (in_dims.width / out_dims.width)
    yo = yo * (in_dims.height / out_dims.height)
    inv = np.linalg.inv(lin) if np.any(lin != np.diag(np.diag(lin))) else np.diag(1.0 / np.diag(lin))
    bx, by = xo - shift[0], yo - shift[1]
    gx = inv[0, 0] * bx + inv[0, 1] * by
    gy = inv[1, 0] * bx + inv[1, 1] * by
    return gx - 0.5, gy - 0.5


def grid_from_normalized_affine(At: np.ndarray, in_dims: CanvasDims, out_dims: CanvasDims):
    xo, yo = _out_centers(out_dims)
    xn = 2.0 * xo / out_dims.width - 1.0
    yn = 2.0 * yo / out_dims.height - 1.0
    xi = At[0, 0] * xn + At[1, 0] * yn + At[2, 0]
    yi = At[0, 1] * xn + At[1, 1] * yn + At[2, 1]
    return (xi + 1.0) * 0.5 * in_dims.width - 0.5, (yi + 1.0) * 0.5 * in_dims.height - 0.5


def resample(img: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """Bilinear sampling at index-space coordinates; zero outside the image."""
    squeeze = img.ndim == 2
    src = np.ascontiguousarray(img[:, :, None] if squeeze else img, dtype=float)
    out = kernels.bilinear_sample(src, np.ascontiguousarray(gx), np.ascontiguousarray(gy))
    return out[:, :, 0] if squeeze else out


def zoom(img: np.ndarray, bbox: BBox, out_dims: CanvasDims | None = None) -> np.ndarray:
    """Resample the bbox region of ``img`` (HxW or HxWxC) to ``out_dims``."""
    dims = CanvasDims.of(img)
    out_dims = out_dims or dims
    gx, gy = grid_from_pixel_affine(pixel_affine(bbox, dims), dims, out_dims)
    return resample(img, gx, gy)


def zoom_normalized(img: np.ndarray, bbox_norm, out_dims: CanvasDims | None = None) -> np.ndarray:
    dims = CanvasDims.of(img)
    out_dims = out_dims or dims
    gx, gy = grid_from_normalized_affine(normalized_affine(bbox_norm), dims, out_dims)
    return resample(img, gx, gy)


def bbox_from_mask(seg: np.ndarray, threshold: float = 0.5, pad_frac: float = 0.0) -> BBox:
    """Tight box over ``seg >= threshold``, grown by ``ceil(pad_frac * extent)``
    pixels per axis (split across both sides) and clipped to the image."""
    rows, cols = np.nonzero(seg >= threshold)
    if rows.size == 0:
        raise NoForegroundError(f"no foreground pixels at threshold {threshold}")
    H, W = seg.shape
    x0, x1 = int(cols.min()), int(cols.max()) + 1
    y0, y1 = int(rows.min()), int(rows.max()) + 1
    px = math.ceil(pad_frac * (x1 - x0) - 1e-9)
    py = math.ceil(pad_frac * (y1 - y0) - 1e-9)
    x0, x1 = max(0, x0 - px // 2), min(W, x1 + px - px // 2)
    y0, y1 = max(0, y0 - py // 2), min(H, y1 + py - py // 2)
    return BBox(x0, y0, x1 - x0, y1 - y0)
