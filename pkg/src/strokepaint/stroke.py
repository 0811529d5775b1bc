"""Quadratic Bezier brush strokes and their density / color rendering."""
from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from . import kernels

PARAM_NAMES = ("x0", "y0", "x1", "y1", "x2", "y2", "z0", "z2", "w0", "w2", "r", "g", "b")
SHAPE_PARAMS = PARAM_NAMES[:10]
N_PARAMS = len(PARAM_NAMES)


@dataclass(frozen=True)
class StrokeParams:
    """One brush stroke: 3 control points, endpoint opacity and width, RGB color.

    Coordinates are fractions of the canvas width (x) and height (y).
    """

    x0: float
    y0: float
    x1: float
    y1: float
    x2: float
    y2: float
    z0: float
    z2: float
    w0: float
    w2: float
    r: float
    g: float
    b: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"stroke parameter {f.name}={v!r} outside [0, 1]")

    @classmethod
    def from_array(cls, vec) -> StrokeParams:
        vec = np.asarray(vec, dtype=float).ravel()
        if vec.shape != (N_PARAMS,):
            raise ValueError(f"expected {N_PARAMS} stroke parameters, got {vec.shape[0]}")
        return cls(*(float(v) for v in vec))

    def to_array(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in PARAM_NAMES])

    @property
    def color(self) -> tuple[float, float, float]:
        return (self.r, self.g, self.b)

    def swapped_ends(self) -> StrokeParams:
        """The same curve traversed from the other end."""
        return StrokeParams(self.x2, self.y2, self.x1, self.y1, self.x0, self.y0,
                            self.z2, self.z0, self.w2, self.w0, self.r, self.g, self.b)


@dataclass(frozen=True)
class CanvasDims:
    height: int
    width: int

    def __post_init__(self):
        if self.height < 8 or self.width < 8:
            raise ValueError(f"canvas must be at least 8x8, got {self.height}x{self.width}")

    @classmethod
    def of(cls, arr: np.ndarray) -> CanvasDims:
        return cls(int(arr.shape[0]), int(arr.shape[1]))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)


@dataclass(frozen=True)
class RenderConfig:
    n_samples: int = 100
    r_max_frac: float = 0.125  # max brush radius as a fraction of min(H, W)
    rho_min: float = 0.5  # pixels
    aa_band: float = 2.0  # full width of the edge falloff, pixels
    falloff: str = "quintic"  # "quintic" (C2) or "cubic" smoothstep

    def __post_init__(self):
        if self.n_samples < 2:
            raise ValueError("n_samples must be >= 2")
        if self.aa_band <= 0 or self.rho_min <= 0 or self.r_max_frac <= 0:
            raise ValueError("r_max_frac, rho_min and aa_band must be positive")
        if self.falloff not in ("quintic", "cubic"):
            raise ValueError(f"unknown falloff {self.falloff!r}")


DEFAULT_RENDER = RenderConfig()


def bezier_point(p0, p1, p2, u: float) -> np.ndarray:
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"curve parameter {u} outside [0, 1]")
    p0, p1, p2 = (np.asarray(p, dtype=float) for p in (p0, p1, p2))
    v = 1.0 - u
    return v * v * p0 + 2.0 * u * v * p1 + u * u * p2


def curve_samples(a: StrokeParams, dims: CanvasDims, cfg: RenderConfig = DEFAULT_RENDER,
                  clamp_radius: bool = True):
    """Sample centers (pixel units), opacity and radius at u_k = k/(N-1).

    ``u`` and ``1-u`` are both formed as exact quotients, so reversing the
    stroke yields the same sample set bit for bit. With ``clamp_radius=False``
    the radius is the raw width interpolation, before the ``rho_min`` floor.
    """
    n = cfg.n_samples
    k = np.arange(n, dtype=float)
    u = k / (n - 1)
    v = (n - 1 - k) / (n - 1)
    px = (v * v * a.x0 + 2.0 * u * v * a.x1 + u * u * a.x2) * dims.width
    py = (v * v * a.y0 + 2.0 * u * v * a.y1 + u * u * a.y2) * dims.height
    alpha = v * a.z0 + u * a.z2
    r_max = cfg.r_max_frac * min(dims.height, dims.width)
    rho = (v * a.w0 + u * a.w2) * r_max
    if clamp_radius:
        rho = np.maximum(cfg.rho_min, rho)
    return px, py, alpha, rho


def rasterize_density(a: StrokeParams, dims: CanvasDims,
                      cfg: RenderConfig = DEFAULT_RENDER) -> np.ndarray:
    """Anti-aliased density map of a stroke, shape (H, W), values in [0, 1].

    The brush is a disc swept along the polyline through the N curve samples;
    radius and opacity are interpolated linearly between samples and the
    coverage falls off across ``aa_band`` pixels (narrowed to ``2*radius`` for
    sub-pixel brushes) with a quintic smootherstep, so the map is C2 in the
    stroke parameters away from self-overlap ridges.
    Overlapping parts of the stroke combine by max.
    """
    if a.z0 <= 0.0 and a.z2 <= 0.0:
        return np.zeros(dims.shape)
    px, py, alpha, rho = curve_samples(a, dims, cfg, clamp_radius=False)
    d = kernels.sweep_density(px, py, alpha, rho, cfg.rho_min, 0.5 * cfg.aa_band,
                              dims.height, dims.width, cfg.falloff == "quintic")
    return np.clip(d, 0.0, 1.0, out=d)


def colorize(density: np.ndarray, color) -> np.ndarray:
    color = np.asarray(color, dtype=float)
    if color.shape != (3,) or np.any(color < 0) or np.any(color > 1):
        raise ValueError(f"color must be three values in [0, 1], got {color}")
    return density[:, :, None] * color


@dataclass
class SmoothnessReport:
    eps: float
    coarse: dict[str, float]
    fine: dict[str, float]
    flagged: list[str]

    @property
    def ok(self) -> bool:
        return not self.flagged


def smoothness_report(a: StrokeParams, dims: CanvasDims, eps: float = 1e-3,
                      cfg: RenderConfig = DEFAULT_RENDER, rel_tol: float = 0.25,
                      abs_floor: float = 1e-6) -> SmoothnessReport:
    """Central differences of the total density at steps eps and eps/10.

    A parameter is flagged when both estimates exceed ``abs_floor`` and they
    disagree by more than ``rel_tol`` relative to the larger one. Positions
    and widths must lie in [eps, 1-eps]; opacities may sit on the bounds, where
    the difference becomes one-sided (density is linear in opacity).
    """
    if not 0.0 < eps <= 0.05:
        raise ValueError(f"eps must lie in (0, 0.05], got {eps}")
    base = a.to_array()
    inner = base[[0, 1, 2, 3, 4, 5, 8, 9]]
    if np.any(inner < eps) or np.any(inner > 1.0 - eps):
        raise ValueError("stroke position and width parameters must lie in [eps, 1-eps]")

    def total(vec):
        return float(rasterize_density(StrokeParams.from_array(vec), dims, cfg).sum())

    def central(idx, h):
        up, dn = base.copy(), base.copy()
        up[idx] = min(1.0, base[idx] + h)
        dn[idx] = max(0.0, base[idx] - h)
        return (total(up) - total(dn)) / (up[idx] - dn[idx])

    coarse, fine, flagged = {}, {}, []
    for idx, name in enumerate(SHAPE_PARAMS):
        d1 = central(idx, eps)
        d2 = central(idx, eps / 10.0)
        coarse[name], fine[name] = d1, d2
        big = max(abs(d1), abs(d2))
        if abs(d1) > abs_floor and abs(d2) > abs_floor and abs(d1 - d2) > rel_tol * big:
            flagged.append(name)
    return SmoothnessReport(eps, coarse, fine, flagged)
