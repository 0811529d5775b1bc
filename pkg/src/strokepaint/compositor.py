"""Bi-level canvas update: background strokes outside the mask, foreground inside."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .stroke import DEFAULT_RENDER, CanvasDims, RenderConfig, StrokeParams, rasterize_density


@dataclass
class ActionBundle:
    background: list[StrokeParams] = field(default_factory=list)
    foreground: list[StrokeParams] = field(default_factory=list)

    def __post_init__(self):
        if len(self) < 1:
            raise ValueError("an action bundle needs at least one stroke")

    def __len__(self):
        return len(self.background) + len(self.foreground)

    def strokes(self):
        """(role, stroke) pairs in application order."""
        return [("background", a) for a in self.background] + \
               [("foreground", a) for a in self.foreground]

    def to_vector(self) -> np.ndarray:
        return np.concatenate([a.to_array() for _, a in self.strokes()])

    @classmethod
    def from_vector(cls, vec, n_background: int, n_foreground: int) -> ActionBundle:
        vec = np.asarray(vec, dtype=float).ravel()
        k = n_background + n_foreground
        if vec.shape[0] != 13 * k:
            raise ValueError(f"bundle of {k} strokes needs {13 * k} values, got {vec.shape[0]}")
        rows = [StrokeParams.from_array(r) for r in vec.reshape(k, 13)]
        return cls(rows[:n_background], rows[n_background:])

    @classmethod
    def noop(cls, n_background: int, n_foreground: int) -> ActionBundle:
        """Zero-opacity bundle; leaves any canvas bit-identical."""
        vec = np.full((n_background + n_foreground, 13), 0.5)
        vec[:, 6:8] = 0.0
        return cls.from_vector(vec.ravel(), n_background, n_foreground)


def _check(canvas: np.ndarray, seg: np.ndarray):
    if canvas.ndim != 3 or canvas.shape[2] != 3:
        raise ValueError(f"canvas must be HxWx3, got {canvas.shape}")
    if seg.shape != canvas.shape[:2]:
        raise ValueError(f"mask {seg.shape} does not match canvas {canvas.shape[:2]}")


def _deposit(canvas, a, region, render, masked_attenuation):
    d = rasterize_density(a, CanvasDims.of(canvas), render)
    if not d.any():
        return canvas.copy()
    return kernels.composite(np.ascontiguousarray(canvas, dtype=float), d,
                             np.asarray(a.color, dtype=float),
                             np.ascontiguousarray(region, dtype=float), masked_attenuation)


def apply_background_stroke(canvas: np.ndarray, a: StrokeParams, seg: np.ndarray,
                            render: RenderConfig = DEFAULT_RENDER,
                            masked_attenuation: bool = False) -> np.ndarray:
    """``(1 - d) * C + d * color * (1 - S)``.

    The attenuation term is unmasked, so a background stroke crossing the
    foreground darkens it. ``masked_attenuation=True`` uses
    ``(1 - d * (1 - S)) * C`` instead.
    """
    _check(canvas, seg)
    return _deposit(canvas, a, 1.0 - seg, render, masked_attenuation)


def apply_foreground_stroke(canvas: np.ndarray, a: StrokeParams, seg: np.ndarray,
                            render: RenderConfig = DEFAULT_RENDER,
                            masked_attenuation: bool = False) -> np.ndarray:
    """``(1 - d) * C + d * color * S``; mirror of the background update."""
    _check(canvas, seg)
    return _deposit(canvas, a, seg, render, masked_attenuation)


def apply_stroke(canvas, role, a, seg, render=DEFAULT_RENDER, masked_attenuation=False):
    if role == "background":
        return apply_background_stroke(canvas, a, seg, render, masked_attenuation)
    if role == "foreground":
        return apply_foreground_stroke(canvas, a, seg, render, masked_attenuation)
    raise ValueError(f"unknown stroke role {role!r}")


def apply_bundle(canvas: np.ndarray, bundle: ActionBundle, seg: np.ndarray,
                 render: RenderConfig = DEFAULT_RENDER,
                 masked_attenuation: bool = False) -> np.ndarray:
    """All background strokes in order, then all foreground strokes in order."""
    _check(canvas, seg)
    out = canvas
    for role, a in bundle.strokes():
        out = apply_stroke(out, role, a, seg, render, masked_attenuation)
    return out.copy() if out is canvas else out
