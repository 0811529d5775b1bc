"""Self-checks run by ``strokepaint check``: sampling oracle, compositing
algebra, affine identities, instance selection and smoothness."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .align import (BBox, grid_from_normalized_affine, grid_from_pixel_affine,
                    normalized_affine, pixel_affine, resample, zoom)
from .compositor import apply_background_stroke, apply_foreground_stroke
from .painter import select_instance
from .stroke import (CanvasDims, RenderConfig, StrokeParams, rasterize_density,
                     smoothness_report)


@dataclass
class CheckResult:
    name: str
    ok: bool
    value: float
    limit: float
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        extra = f"  {self.detail}" if self.detail else ""
        return f"{tag}  {self.name}: {self.value:.4g} (limit {self.limit:.4g}){extra}"


def random_stroke(rng, lo=0.0, hi=1.0) -> StrokeParams:
    return StrokeParams.from_array(rng.uniform(lo, hi, 13))


def rasterizer_oracle(n=200, size=64, seed=0, render=None) -> CheckResult:
    """Production sampling vs a 1000-sample render of the same strokes."""
    render = render or RenderConfig()
    fine = RenderConfig(1000, render.r_max_frac, render.rho_min, render.aa_band, render.falloff)
    rng = np.random.default_rng(seed)
    dims = CanvasDims(size, size)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(n):
        a = random_stroke(rng)
        diff = np.abs(rasterize_density(a, dims, render) - rasterize_density(a, dims, fine))
        worst = max(worst, float(diff.max()))
    elapsed = time.perf_counter() - t0
    return CheckResult("rasterizer oracle", worst <= 1e-2 and elapsed < 10.0, worst, 1e-2,
                       f"{n} strokes in {elapsed:.2f}s")


def compositing_algebra(n=100, size=32, seed=1) -> CheckResult:
    """S=0 background and S=1 foreground updates equal alpha-over;
    zero-opacity strokes leave the canvas bit-identical."""
    rng = np.random.default_rng(seed)
    dims = CanvasDims(size, size)
    zeros, ones = np.zeros(dims.shape), np.ones(dims.shape)
    worst, identity = 0.0, True
    for _ in range(n):
        canvas = rng.random((size, size, 3))
        a = random_stroke(rng)
        d = rasterize_density(a, dims)[:, :, None]
        over = (1.0 - d) * canvas + d * np.array(a.color)
        worst = max(worst, float(np.abs(apply_background_stroke(canvas, a, zeros) - over).max()),
                    float(np.abs(apply_foreground_stroke(canvas, a, ones) - over).max()))
        vec = a.to_array()
        vec[6:8] = 0.0
        clear = StrokeParams.from_array(vec)
        seg = rng.random(dims.shape)
        identity &= np.array_equal(apply_background_stroke(canvas, clear, seg), canvas)
        identity &= np.array_equal(apply_foreground_stroke(canvas, clear, seg), canvas)
    return CheckResult("compositing algebra", worst <= 1e-9 and identity, worst, 1e-9,
                       "" if identity else "zero-opacity stroke changed the canvas")


def random_bbox(rng, dims: CanvasDims) -> BBox:
    w = int(rng.integers(1, dims.width + 1))
    h = int(rng.integers(1, dims.height + 1))
    return BBox(int(rng.integers(0, dims.width - w + 1)), int(rng.integers(0, dims.height - h + 1)), w, h)


def crop_resize(img, bbox: BBox, out_dims: CanvasDims):
    """Reference zoom: crop with a 1px margin, then a separable bilinear resize."""
    H, W = img.shape[:2]
    x0, y0 = max(0, int(bbox.x) - 1), max(0, int(bbox.y) - 1)
    x1, y1 = min(W, int(bbox.x + bbox.w) + 1), min(H, int(bbox.y + bbox.h) + 1)
    crop = img[y0:y1, x0:x1]
    xs = bbox.x + (np.arange(out_dims.width) + 0.5) * bbox.w / out_dims.width - 0.5 - x0
    ys = bbox.y + (np.arange(out_dims.height) + 0.5) * bbox.h / out_dims.height - 0.5 - y0

    def interp_axis(arr, coords, axis, size, lo, hi):
        # zero padding beyond the image, clamping only at crop edges inside it
        arr = np.moveaxis(arr, axis, 0)
        pad = np.zeros((1,) + arr.shape[1:])
        body = arr
        if lo == 0:
            body = np.concatenate([pad, body])
            coords = coords + 1
        if hi == size:
            body = np.concatenate([body, pad])
        i0 = np.clip(np.floor(coords).astype(int), 0, body.shape[0] - 1)
        i1 = np.clip(i0 + 1, 0, body.shape[0] - 1)
        f = (coords - np.floor(coords)).reshape((-1,) + (1,) * (body.ndim - 1))
        out = body[i0] * (1 - f) + body[i1] * f
        return np.moveaxis(out, 0, axis)

    tmp = interp_axis(crop, xs, 1, W, x0, x1)
    return interp_axis(tmp, ys, 0, H, y0, y1)


def affine_identities(n=50, size=48, seed=2) -> CheckResult:
    rng = np.random.default_rng(seed)
    dims = CanvasDims(size, size + 8)
    img = rng.random((dims.height, dims.width, 3))
    ident = float(np.abs(zoom(img, BBox.full(dims)) - img).max())
    conv, crop = 0.0, 0.0
    for _ in range(n):
        bb = random_bbox(rng, dims)
        g1 = grid_from_pixel_affine(pixel_affine(bb, dims), dims, dims)
        g2 = grid_from_normalized_affine(normalized_affine(bb.normalized(dims)), dims, dims)
        conv = max(conv, float(np.abs(resample(img, *g1) - resample(img, *g2)).max()))
        crop = max(crop, float(np.abs(zoom(img, bb) - crop_resize(img, bb, dims)).max()))
    ok = ident <= 1e-6 and conv <= 1e-5 and crop <= 1e-3
    return CheckResult("affine identities", ok, max(ident, conv, crop), 1e-6,
                       f"identity {ident:.2g}, conventions {conv:.2g}, crop+resize {crop:.2g}")


def instance_oracle(n=50, size=32, seed=3) -> CheckResult:
    rng = np.random.default_rng(seed)
    mismatches = 0
    for _ in range(n):
        k = int(rng.integers(1, 9))
        target = rng.random((size, size, 3))
        canvas = rng.random((size, size, 3))
        masks = [(rng.random((size, size)) < 0.3).astype(float) for _ in range(k)]
        if k > 1 and rng.random() < 0.3:
            masks[-1] = masks[0].copy()  # forced tie
        norms = [np.linalg.norm((m[:, :, None] * (target - canvas)).ravel()) for m in masks]
        brute = max(range(k), key=lambda i: (norms[i], -i))
        mismatches += select_instance(target, canvas, masks) != brute
    return CheckResult("instance selection", mismatches == 0, mismatches, 0, f"{n} scenes")


def smoothness(n=50, size=64, eps=1e-3, seed=4) -> CheckResult:
    rng = np.random.default_rng(seed)
    dims = CanvasDims(size, size)
    flagged = 0
    names = {}
    for _ in range(n):
        rep = smoothness_report(random_stroke(rng, eps, 1.0 - eps), dims, eps)
        flagged += len(rep.flagged)
        for name in rep.flagged:
            names[name] = names.get(name, 0) + 1
    detail = ", ".join(f"{k}:{v}" for k, v in sorted(names.items()))
    return CheckResult("gradient smoothness", flagged == 0, flagged, 0,
                       f"{n} strokes" + (f"; flagged {detail}" if detail else ""))


ALL_CHECKS = (rasterizer_oracle, compositing_algebra, affine_identities, instance_oracle,
              smoothness)


def run_all(checks=ALL_CHECKS) -> list[CheckResult]:
    return [c() for c in checks]
