"""Difference-of-score rewards, GBP focus reward and their weighted total.

A scorer is any callable ``score(reference, candidate) -> float`` that is
deterministic, bounded on [0, 1] images and larger for closer images. It
stands in for a learned critic; every reward is a difference of two scores,
so swapping the scorer never changes the telescoping structure.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .align import BBox, zoom
from .stroke import CanvasDims

log = logging.getLogger(__name__)

Scorer = Callable[[np.ndarray, np.ndarray], float]


def _same_shape(a, b):
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")


def neg_l2_score(reference: np.ndarray, candidate: np.ndarray) -> float:
    _same_shape(reference, candidate)
    diff = reference - candidate
    return -float(np.mean(diff * diff))


def neg_l1_down4_score(reference: np.ndarray, candidate: np.ndarray) -> float:
    """Negative mean absolute difference of 4x4 block averages."""
    _same_shape(reference, candidate)

    def down(img):
        h, w = (img.shape[0] // 4) * 4, (img.shape[1] // 4) * 4
        img = img[:h, :w]
        return img.reshape(h // 4, 4, w // 4, 4, *img.shape[2:]).mean(axis=(1, 3))

    return -float(np.mean(np.abs(down(reference) - down(candidate))))


SCORERS: dict[str, Scorer] = {"neg_l2": neg_l2_score, "neg_l1_down4": neg_l1_down4_score}


def get_scorer(name: str) -> Scorer:
    try:
        return SCORERS[name]
    except KeyError:
        raise ValueError(f"unknown scorer {name!r}; choose from {sorted(SCORERS)}") from None


def _masked(img, seg):
    return img * seg[:, :, None]


def background_reward(scorer: Scorer, target, canvas, canvas_next) -> float:
    _same_shape(canvas, canvas_next)
    return scorer(target, canvas_next) - scorer(target, canvas)


def foreground_reward_unaligned(scorer: Scorer, target, canvas, canvas_next, seg) -> float:
    _same_shape(canvas, canvas_next)
    ref = _masked(target, seg)
    return scorer(ref, _masked(canvas_next, seg)) - scorer(ref, _masked(canvas, seg))


def foreground_reward_aligned(scorer: Scorer, target, canvas, canvas_next, seg, bbox: BBox,
                              out_dims: CanvasDims | None = None) -> float:
    _same_shape(canvas, canvas_next)
    zs = zoom(seg, bbox, out_dims)
    ref = _masked(zoom(target, bbox, out_dims), zs)
    return (scorer(ref, _masked(zoom(canvas_next, bbox, out_dims), zs))
            - scorer(ref, _masked(zoom(canvas, bbox, out_dims), zs)))


def gbp_distance(z_gbp: np.ndarray, z_target: np.ndarray, z_canvas: np.ndarray,
                 norm: str = "frobenius") -> float:
    """Squared Frobenius norm of the GBP-weighted difference over the map's norm.

    ``norm="frobenius"`` divides by ``||G||_F``; ``norm="count"`` divides by the
    number of non-zero map pixels instead.
    """
    _same_shape(z_target, z_canvas)
    if z_gbp.shape != z_target.shape[:2]:
        raise ValueError(f"GBP map {z_gbp.shape} does not match image {z_target.shape[:2]}")
    if norm == "frobenius":
        denom = float(np.sqrt(np.sum(z_gbp * z_gbp)))
    elif norm == "count":
        denom = float(np.count_nonzero(z_gbp))
    else:
        raise ValueError(f"unknown GBP normalization {norm!r}")
    if denom == 0.0:
        raise ValueError("GBP map is identically zero")
    weighted = z_gbp[:, :, None] * (z_target - z_canvas)
    return float(np.sum(weighted * weighted)) / denom


def focus_reward(dist_now: float, dist_next: float) -> float:
    return dist_now - dist_next


@dataclass(frozen=True)
class RewardWeights:
    eta: float = 2.0
    nu: float = 10.0
    kappa: float = 0.0

    def __post_init__(self):
        if not all(np.isfinite(v) for v in (self.eta, self.nu, self.kappa)):
            raise ValueError("reward weights must be finite")


@dataclass(frozen=True)
class RewardBreakdown:
    background: float
    foreground: float
    focus: float
    total: float
    mode: str = "bilevel"

    def recompute(self, weights: RewardWeights) -> float:
        if self.mode == "ablation":
            return self.background + weights.kappa * self.focus
        return self.background + weights.eta * self.foreground + weights.nu * self.focus

    def as_dict(self) -> dict:
        return {"background": self.background, "foreground": self.foreground,
                "focus": self.focus, "total": self.total}


ZERO_REWARD = RewardBreakdown(0.0, 0.0, 0.0, 0.0)


def total_reward(background: float, foreground: float, focus: float,
                 weights: RewardWeights = RewardWeights(), mode: str = "bilevel") -> RewardBreakdown:
    """Weighted total: ``r_b + eta*r_f + nu*r_focus`` (bi-level) or
    ``r_wgan + kappa*r_focus`` (ablation, where ``r_wgan`` is the unmasked
    score difference carried in ``background``)."""
    if mode == "bilevel":
        total = background + weights.eta * foreground + weights.nu * focus
    elif mode == "ablation":
        total = background + weights.kappa * focus
    else:
        raise ValueError(f"unknown reward mode {mode!r}")
    return RewardBreakdown(background, foreground, focus, total, mode)


@dataclass(frozen=True)
class CanvasTerms:
    """Per-canvas scores whose successive differences are the rewards."""
    background: float
    foreground: float
    gbp: float


class RewardContext:
    """Caches the target-side zooms for one (target, mask, GBP map, bbox).

    ``terms(canvas)`` evaluates the three per-canvas quantities once; the
    reward of a step is ``reward(terms(C_t), terms(C_t+1))``.
    """

    def __init__(self, scorer: Scorer, target, seg, gbp, bbox: BBox,
                 weights: RewardWeights = RewardWeights(), mode: str = "bilevel",
                 aligned: bool = True, gbp_norm: str = "frobenius",
                 out_dims: CanvasDims | None = None):
        self.scorer = scorer
        self.target = target
        self.seg = seg
        self.bbox = bbox
        self.weights = weights
        self.mode = mode
        self.aligned = aligned
        self.gbp_norm = gbp_norm
        self.out_dims = out_dims
        if aligned:
            self.z_seg = zoom(seg, bbox, out_dims)
            self.fg_ref = _masked(zoom(target, bbox, out_dims), self.z_seg)
        else:
            self.fg_ref = _masked(target, seg)
        self.z_target = zoom(target, bbox, out_dims)
        self.z_gbp = zoom(gbp, bbox, out_dims)
        # a box with no importance mass (e.g. an instance away from the
        # salient feature) has nothing to focus on; the focus term is 0 there
        self.has_focus = bool(self.z_gbp.any())
        if not self.has_focus:
            log.warning("GBP map is zero inside %s; focus reward disabled for it", bbox)

    def terms(self, canvas: np.ndarray) -> CanvasTerms:
        bg = self.scorer(self.target, canvas)
        z_canvas = zoom(canvas, self.bbox, self.out_dims)
        if self.aligned:
            fg = self.scorer(self.fg_ref, _masked(z_canvas, self.z_seg))
        else:
            fg = self.scorer(self.fg_ref, _masked(canvas, self.seg))
        g = gbp_distance(self.z_gbp, self.z_target, z_canvas, self.gbp_norm) if self.has_focus else 0.0
        return CanvasTerms(bg, fg, g)

    def reward(self, now: CanvasTerms, nxt: CanvasTerms) -> RewardBreakdown:
        return total_reward(nxt.background - now.background,
                            nxt.foreground - now.foreground,
                            focus_reward(now.gbp, nxt.gbp),
                            self.weights, self.mode)
