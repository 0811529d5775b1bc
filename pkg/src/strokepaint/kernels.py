"""Hot inner loops: swept-disc stroke density, compositing, bilinear resampling.

The stroke kernel treats consecutive curve samples as a tapered capsule (the
hull of the two sample discs). For each pixel and segment it picks the point
of maximal clearance ``r(t) - dist(t)``, which is concave in ``t`` and so has
a closed-form maximizer; opacity is read at that same point and segments
combine by max. The radius arrives unfloored: where a segment dips below
``rho_min`` the clearance of ``max(rho_min, r(t))`` is the better of two closed
forms, which keeps the kink of the floor out of the interpolation.

Each kernel has a loop form (compiled with numba when available) and a
vectorized numpy form. ``sweep_density`` and ``bilinear_sample`` point at the
active backend; both forms stay importable so they can be cross-checked.

Pixel convention: pixel ``(i, j)`` has its center at continuous coordinate
``(x, y) = (j + 0.5, i + 0.5)``.
"""
import math

import numpy as np

from ._accel import HAS_NUMBA, njit


def _row_span(cy, dx, dy, ux, uy, seg_len, reach):
    # x-interval (relative to the segment start) of the row at offset cy that
    # lies within ``reach`` of the segment; the region is convex, so it is the
    # hull of the two end discs and the side strip.
    lo = math.inf
    hi = -math.inf
    if abs(cy) <= reach:
        h = math.sqrt(reach * reach - cy * cy)
        lo = min(lo, -h)
        hi = max(hi, h)
    e = cy - dy
    if abs(e) <= reach:
        h = math.sqrt(reach * reach - e * e)
        lo = min(lo, dx - h)
        hi = max(hi, dx + h)
    if seg_len > 0.0:
        s_lo = -math.inf
        s_hi = math.inf
        ok = True
        if ux > 0.0:
            s_lo = max(s_lo, -cy * uy / ux)
            s_hi = min(s_hi, (seg_len - cy * uy) / ux)
        elif ux < 0.0:
            s_lo = max(s_lo, (seg_len - cy * uy) / ux)
            s_hi = min(s_hi, -cy * uy / ux)
        elif not (0.0 <= cy * uy <= seg_len):
            ok = False
        if uy > 0.0:
            s_lo = max(s_lo, (cy * ux - reach) / uy)
            s_hi = min(s_hi, (cy * ux + reach) / uy)
        elif uy < 0.0:
            s_lo = max(s_lo, (cy * ux + reach) / uy)
            s_hi = min(s_hi, (cy * ux - reach) / uy)
        elif abs(cy * ux) > reach:
            ok = False
        if ok and s_lo <= s_hi:
            lo = min(lo, s_lo)
            hi = max(hi, s_hi)
    return lo, hi


def _sweep_density_loop(px, py, alpha, rho, rho_min, band_half, height, width, quintic):
    # rho is the unclamped linear radius; the brush radius is max(rho_min, rho)
    n = px.shape[0]
    out = np.zeros((height, width))
    nseg = n - 1 if n > 1 else 1
    for k in range(nseg):
        k1 = k + 1 if n > 1 else k
        ax = px[k]
        ay = py[k]
        dx = px[k1] - ax
        dy = py[k1] - ay
        a0 = alpha[k]
        da = alpha[k1] - a0
        if a0 <= 0.0 and a0 + da <= 0.0:
            continue
        r0 = rho[k]
        dr = rho[k1] - r0
        floored = min(r0, r0 + dr) < rho_min
        reach = max(rho_min, r0, r0 + dr) + band_half
        seg_len = math.sqrt(dx * dx + dy * dy)
        if seg_len > 0.0:
            ux = dx / seg_len
            uy = dy / seg_len
            slope = dr / seg_len
        else:
            ux = 1.0
            uy = 0.0
            slope = 0.0
        shift = 0.0
        if -1.0 < slope < 1.0:
            shift = slope / math.sqrt(1.0 - slope * slope)
        j_lo = max(0, int(math.floor(min(ax, ax + dx) - reach - 0.5)))
        j_hi = min(width - 1, int(math.ceil(max(ax, ax + dx) + reach - 0.5)))
        i_lo = max(0, int(math.floor(min(ay, ay + dy) - reach - 0.5)))
        i_hi = min(height - 1, int(math.ceil(max(ay, ay + dy) + reach - 0.5)))
        for i in range(i_lo, i_hi + 1):
            cy = i + 0.5 - ay
            lo, hi = _row_span(cy, dx, dy, ux, uy, seg_len, reach)
            if lo > hi:
                continue
            j0 = max(j_lo, int(math.floor(ax + lo - 0.5)))
            j1 = min(j_hi, int(math.ceil(ax + hi - 0.5)))
            for j in range(j0, j1 + 1):
                cx = j + 0.5 - ax
                along = cx * ux + cy * uy
                perp = abs(cy * ux - cx * uy)
                # clearance r(tau) - dist(tau) is concave in tau: closed-form argmax
                if slope >= 1.0:
                    tau = seg_len
                elif slope <= -1.0:
                    tau = 0.0
                else:
                    tau = along + shift * perp
                    if tau < 0.0:
                        tau = 0.0
                    elif tau > seg_len:
                        tau = seg_len
                t = tau / seg_len if seg_len > 0.0 else 0.0
                ex = cx - tau * ux
                ey = cy - tau * uy
                r = r0 + t * dr
                clear = r - math.sqrt(ex * ex + ey * ey)
                if floored:
                    # max(rho_min, lin) - dist: the better of the two closed forms
                    tau = min(max(along, 0.0), seg_len)
                    ex = cx - tau * ux
                    ey = cy - tau * uy
                    c_min = rho_min - math.sqrt(ex * ex + ey * ey)
                    if c_min >= clear:
                        clear = c_min
                        t = tau / seg_len if seg_len > 0.0 else 0.0
                    r = max(rho_min, r0 + t * dr)
                # sub-pixel radii shrink the band so the centerline stays on the plateau
                b = band_half if r > band_half else r
                if clear <= -b:
                    continue
                if clear >= b:
                    cov = 1.0
                else:
                    s = (clear + b) / (2.0 * b)
                    if quintic:
                        cov = s * s * s * (s * (6.0 * s - 15.0) + 10.0)
                    else:
                        cov = s * s * (3.0 - 2.0 * s)
                v = (a0 + t * da) * cov
                if v > out[i, j]:
                    out[i, j] = v
    return out


def sweep_density_numpy(px, py, alpha, rho, rho_min, band_half, height, width, quintic=True):
    """Vectorized form of the swept-disc density (one numpy pass per segment)."""
    n = px.shape[0]
    out = np.zeros((height, width))
    ks = range(n - 1) if n > 1 else [0]
    for k in ks:
        k1 = k + 1 if n > 1 else k
        ax, ay = px[k], py[k]
        dx, dy = px[k1] - ax, py[k1] - ay
        a0, da = alpha[k], alpha[k1] - alpha[k]
        if a0 <= 0.0 and a0 + da <= 0.0:
            continue
        r0, dr = rho[k], rho[k1] - rho[k]
        reach = max(rho_min, r0, r0 + dr) + band_half
        seg_len = math.sqrt(dx * dx + dy * dy)
        if seg_len > 0.0:
            ux, uy, slope = dx / seg_len, dy / seg_len, dr / seg_len
        else:
            ux, uy, slope = 1.0, 0.0, 0.0
        j_lo = max(0, int(math.floor(min(ax, ax + dx) - reach - 0.5)))
        j_hi = min(width - 1, int(math.ceil(max(ax, ax + dx) + reach - 0.5)))
        i_lo = max(0, int(math.floor(min(ay, ay + dy) - reach - 0.5)))
        i_hi = min(height - 1, int(math.ceil(max(ay, ay + dy) + reach - 0.5)))
        if j_lo > j_hi or i_lo > i_hi:
            continue
        cy = (np.arange(i_lo, i_hi + 1) + 0.5 - ay)[:, None]
        cx = (np.arange(j_lo, j_hi + 1) + 0.5 - ax)[None, :]
        along = cx * ux + cy * uy
        perp = np.abs(cy * ux - cx * uy)
        if slope >= 1.0:
            tau = np.full(along.shape, seg_len)
        elif slope <= -1.0:
            tau = np.zeros(along.shape)
        else:
            tau = np.clip(along + slope / math.sqrt(1.0 - slope * slope) * perp, 0.0, seg_len)
        t = tau / seg_len if seg_len > 0.0 else np.zeros(along.shape)
        clear = r0 + t * dr - np.hypot(cx - tau * ux, cy - tau * uy)
        if min(r0, r0 + dr) < rho_min:
            tau_m = np.clip(along, 0.0, seg_len)
            c_min = rho_min - np.hypot(cx - tau_m * ux, cy - tau_m * uy)
            pick = c_min >= clear
            clear = np.where(pick, c_min, clear)
            if seg_len > 0.0:
                t = np.where(pick, tau_m / seg_len, t)
        r = np.maximum(rho_min, r0 + t * dr)
        b = np.where(r > band_half, band_half, r)
        s = np.clip((clear + b) / (2.0 * b), 0.0, 1.0)
        if quintic:
            cov = s * s * s * (s * (6.0 * s - 15.0) + 10.0)
        else:
            cov = s * s * (3.0 - 2.0 * s)
        cov[clear >= b] = 1.0
        cov[clear <= -b] = 0.0
        v = (a0 + t * da) * cov
        win = out[i_lo:i_hi + 1, j_lo:j_hi + 1]
        np.maximum(win, v, out=win)
    return out


def _bilinear_loop(img, gx, gy):
    # img: (H, W, C); gx, gy: (Ho, Wo) source coordinates in pixel-index space
    height, width, nch = img.shape
    ho, wo = gx.shape
    out = np.zeros((ho, wo, nch))
    for i in range(ho):
        for j in range(wo):
            x = gx[i, j]
            y = gy[i, j]
            x0 = int(math.floor(x))
            y0 = int(math.floor(y))
            fx = x - x0
            fy = y - y0
            for c in range(nch):
                v00 = 0.0
                v01 = 0.0
                v10 = 0.0
                v11 = 0.0
                if 0 <= y0 < height:
                    if 0 <= x0 < width:
                        v00 = img[y0, x0, c]
                    if 0 <= x0 + 1 < width:
                        v01 = img[y0, x0 + 1, c]
                if 0 <= y0 + 1 < height:
                    if 0 <= x0 < width:
                        v10 = img[y0 + 1, x0, c]
                    if 0 <= x0 + 1 < width:
                        v11 = img[y0 + 1, x0 + 1, c]
                top = v00 + fx * (v01 - v00)
                bot = v10 + fx * (v11 - v10)
                out[i, j, c] = top + fy * (bot - top)
    return out


def bilinear_numpy(img, gx, gy):
    """Vectorized bilinear sampling with zero padding outside the image."""
    height, width, _ = img.shape
    padded = np.zeros((height + 4, width + 4, img.shape[2]))
    padded[2:-2, 2:-2] = img
    # coordinates far outside only ever touch the zero border
    x = np.clip(gx, -2.0, width + 1.0)
    y = np.clip(gy, -2.0, height + 1.0)
    x0 = np.floor(x).astype(np.int64)
    y0 = np.floor(y).astype(np.int64)
    fx = (x - x0)[..., None]
    fy = (y - y0)[..., None]
    x1 = np.minimum(x0 + 3, width + 3)
    y1 = np.minimum(y0 + 3, height + 3)
    x0 = x0 + 2
    y0 = y0 + 2
    v00 = padded[y0, x0]
    v01 = padded[y0, x1]
    v10 = padded[y1, x0]
    v11 = padded[y1, x1]
    top = v00 + fx * (v01 - v00)
    bot = v10 + fx * (v11 - v10)
    return top + fy * (bot - top)


def _composite_loop(canvas, density, color, region, masked_attenuation):
    height, width, nch = canvas.shape
    out = canvas.copy()
    for i in range(height):
        for j in range(width):
            d = density[i, j]
            if d <= 0.0:
                continue
            m = region[i, j]
            keep = 1.0 - d * m if masked_attenuation else 1.0 - d
            for c in range(nch):
                v = keep * canvas[i, j, c] + d * color[c] * m
                if v < 0.0:
                    v = 0.0
                elif v > 1.0:
                    v = 1.0
                out[i, j, c] = v
    return out


def composite_numpy(canvas, density, color, region, masked_attenuation):
    """``keep * C + d * color * region``, clamped to [0, 1]."""
    d3 = density[:, :, None]
    m3 = region[:, :, None]
    keep = 1.0 - d3 * m3 if masked_attenuation else 1.0 - d3
    out = keep * canvas + d3 * color * m3
    return np.clip(out, 0.0, 1.0, out=out)


if HAS_NUMBA:
    _row_span = njit(cache=True)(_row_span)
    sweep_density_jit = njit(cache=True)(_sweep_density_loop)
    bilinear_jit = njit(cache=True)(_bilinear_loop)
    composite_jit = njit(cache=True)(_composite_loop)
    sweep_density = sweep_density_jit
    bilinear_sample = bilinear_jit
    composite = composite_jit
else:
    sweep_density_jit = None
    bilinear_jit = None
    composite_jit = None
    sweep_density = sweep_density_numpy
    bilinear_sample = bilinear_numpy
    composite = composite_numpy
