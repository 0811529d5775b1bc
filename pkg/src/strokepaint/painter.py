"""Episode engine: MDP state, per-bundle cross-entropy search, instance scheduling."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .align import BBox, bbox_from_mask
from .compositor import ActionBundle, apply_bundle
from .config import OptimizerConfig, PaintConfig
from .rewards import (ZERO_REWARD, RewardBreakdown, RewardContext, RewardWeights, Scorer,
                      get_scorer)
from .stroke import CanvasDims

log = logging.getLogger(__name__)

INSTANCE_PAD = 0.05


@dataclass
class EpisodeState:
    canvas: np.ndarray
    target: np.ndarray
    seg: np.ndarray
    gbp: np.ndarray
    step: int = 0
    instance_masks: list[np.ndarray] = field(default_factory=list)
    bbox: BBox | None = None
    weights: RewardWeights = field(default_factory=RewardWeights)

    def __post_init__(self):
        hw = self.target.shape[:2]
        for name, arr in (("canvas", self.canvas), ("seg", self.seg), ("gbp", self.gbp)):
            if arr.shape[:2] != hw:
                raise ValueError(f"{name} dims {arr.shape[:2]} do not match target {hw}")
        for m in self.instance_masks:
            if m.shape != hw:
                raise ValueError(f"instance mask dims {m.shape} do not match target {hw}")
        if self.step < 0:
            raise ValueError("step must be >= 0")
        if self.bbox is None:
            self.bbox = BBox.full(CanvasDims.of(self.target))


@dataclass(frozen=True)
class StrokeLogRecord:
    step: int
    role: str
    instance: int
    params: tuple[float, ...]
    reward: dict


@dataclass(frozen=True)
class RewardRecord:
    step: int
    instance: int
    reward: RewardBreakdown
    score: float  # scorer(I, C_{t+1})
    gbp_distance: float  # L^G of C_{t+1}


def select_instance(target: np.ndarray, canvas: np.ndarray, masks) -> int:
    """Index of the mask with the largest ``||S_i * (I - C)||_F`` (lowest index on ties)."""
    if len(masks) == 0:
        raise ValueError("no instance masks")
    diff = target - canvas
    best, best_val = 0, -1.0
    for i, m in enumerate(masks):
        if m.shape != diff.shape[:2]:
            raise ValueError(f"instance mask {i} dims {m.shape} do not match {diff.shape[:2]}")
        val = float(np.sqrt(np.sum((m[:, :, None] * diff) ** 2)))
        if val > best_val:
            best, best_val = i, val
    return best


def _rank(totals: np.ndarray, feasible: np.ndarray) -> np.ndarray:
    # feasible candidates first, then by total descending; stable by index
    return np.lexsort((np.arange(len(totals)), -totals, ~feasible))


def optimize_bundle(state: EpisodeState, cfg: OptimizerConfig, scorer: Scorer,
                    paint: PaintConfig | None = None,
                    ctx: RewardContext | None = None) -> tuple[ActionBundle, RewardBreakdown]:
    """Cross-entropy search over one bundle (13*K values in [0, 1]).

    A candidate is feasible when its background reward is non-negative, which
    keeps ``scorer(I, C_t)`` non-decreasing over an episode. The best feasible
    candidate is returned if its total reward is positive; otherwise the
    zero-opacity bundle with zero reward.
    """
    paint = paint or PaintConfig(optimizer=cfg)
    if ctx is None:
        ctx = RewardContext(scorer, state.target, state.seg, state.gbp, state.bbox,
                            state.weights, paint.mode, paint.aligned, paint.gbp_norm)
    nb, nf = cfg.n_background, cfg.n_foreground
    dim = 13 * cfg.bundle_size
    rng = np.random.default_rng([cfg.seed, state.step])
    now = ctx.terms(state.canvas)

    mean = np.full(dim, 0.5)
    sigma = np.full(dim, cfg.init_sigma)
    best_vec, best_reward, best_feasible = None, None, False
    for _ in range(cfg.generations):
        pop = np.clip(mean + sigma * rng.standard_normal((cfg.population, dim)), 0.0, 1.0)
        rewards = []
        for vec in pop:
            bundle = ActionBundle.from_vector(vec, nb, nf)
            nxt = apply_bundle(state.canvas, bundle, state.seg, paint.render, paint.masked_attenuation)
            rewards.append(ctx.reward(now, ctx.terms(nxt)))
        totals = np.array([r.total for r in rewards])
        feasible = np.array([r.background >= 0.0 for r in rewards])
        order = _rank(totals, feasible)
        top = order[0]
        better = best_vec is None or (feasible[top], totals[top]) > (best_feasible, best_reward.total)
        if better:
            best_vec, best_reward, best_feasible = pop[top].copy(), rewards[top], bool(feasible[top])
        elite = pop[order[:cfg.n_elite]]
        mean = elite.mean(axis=0)
        sigma = elite.std(axis=0)

    if not best_feasible or best_reward.total <= 0.0:
        return ActionBundle.noop(nb, nf), ZERO_REWARD
    return ActionBundle.from_vector(best_vec, nb, nf), best_reward


@dataclass
class EpisodeResult:
    canvas: np.ndarray
    strokes: list[StrokeLogRecord]
    rewards: list[RewardRecord]
    initial_score: float
    initial_gbp_distance: float

    @property
    def scores(self) -> list[float]:
        return [self.initial_score] + [r.score for r in self.rewards]


class PaintingEnv:
    """Stateful painting episode shared by the optimizer loop and external agents.

    With ``instance_masks`` each step paints the instance chosen by
    ``select_instance``; its mask is the foreground map for that bundle and
    its bbox (given, or derived from the mask) drives the zoomed rewards.
    """

    def __init__(self, target, seg=None, gbp=None, bbox: BBox | None = None,
                 instance_masks=None, instance_bboxes=None,
                 config: PaintConfig | None = None, scorer: Scorer | None = None):
        self.config = config or PaintConfig()
        self.scorer = scorer or get_scorer(self.config.scorer)
        self.target = np.asarray(target, dtype=float)
        dims = CanvasDims.of(self.target)
        hw = dims.shape
        self.seg = np.ones(hw) if seg is None else np.asarray(seg, dtype=float)
        self.gbp = np.ones(hw) if gbp is None else np.asarray(gbp, dtype=float)
        self.instance_masks = [np.asarray(m, dtype=float) for m in (instance_masks or [])]
        if self.instance_masks:
            if instance_bboxes is None:
                instance_bboxes = [bbox_from_mask(m, 0.5, INSTANCE_PAD) for m in self.instance_masks]
            self.instance_bboxes = [b.validate(dims) for b in instance_bboxes]
        self.bbox = (bbox or BBox.full(dims)).validate(dims)
        self._contexts: dict[int, RewardContext] = {}
        self.reset()

    @property
    def dims(self) -> CanvasDims:
        return CanvasDims.of(self.target)

    @property
    def multi_instance(self) -> bool:
        return bool(self.instance_masks)

    def reset(self) -> np.ndarray:
        self.canvas = np.full(self.target.shape, self.config.canvas_init)
        self.step_index = 0
        self.strokes: list[StrokeLogRecord] = []
        self.rewards: list[RewardRecord] = []
        self.initial_score = self.scorer(self.target, self.canvas)
        self.initial_gbp_distance = self.context(0).terms(self.canvas).gbp
        return self.canvas

    @property
    def done(self) -> bool:
        return self.step_index >= self.config.optimizer.episode_length

    def mask_for(self, instance: int) -> np.ndarray:
        return self.instance_masks[instance] if self.multi_instance else self.seg

    def context(self, instance: int) -> RewardContext:
        if instance not in self._contexts:
            bbox = self.instance_bboxes[instance] if self.multi_instance else self.bbox
            c = self.config
            self._contexts[instance] = RewardContext(
                self.scorer, self.target, self.mask_for(instance), self.gbp, bbox,
                c.weights, c.mode, c.aligned, c.gbp_norm)
        return self._contexts[instance]

    def current_instance(self) -> int:
        if not self.multi_instance:
            return 0
        return select_instance(self.target, self.canvas, self.instance_masks)

    def state(self, instance: int | None = None) -> EpisodeState:
        u = self.current_instance() if instance is None else instance
        return EpisodeState(self.canvas, self.target, self.mask_for(u), self.gbp, self.step_index,
                            self.instance_masks, self.context(u).bbox, self.config.weights)

    def step(self, bundle: ActionBundle, instance: int | None = None) -> RewardBreakdown:
        u = self.current_instance() if instance is None else instance
        ctx = self.context(u)
        c = self.config
        nxt = apply_bundle(self.canvas, bundle, self.mask_for(u), c.render, c.masked_attenuation)
        now_terms, next_terms = ctx.terms(self.canvas), ctx.terms(nxt)
        reward = ctx.reward(now_terms, next_terms)
        for role, a in bundle.strokes():
            self.strokes.append(StrokeLogRecord(self.step_index, role, u,
                                                tuple(a.to_array().tolist()), reward.as_dict()))
        self.rewards.append(RewardRecord(self.step_index, u, reward, next_terms.background,
                                         next_terms.gbp))
        self.canvas = nxt
        self.step_index += 1
        return reward

    def result(self) -> EpisodeResult:
        return EpisodeResult(self.canvas, list(self.strokes), list(self.rewards),
                             self.initial_score, self.initial_gbp_distance)


def run_episode(target, seg=None, gbp=None, bbox: BBox | None = None, instance_masks=None,
                config: PaintConfig | None = None, scorer: Scorer | None = None,
                on_bundle: Callable[[PaintingEnv], None] | None = None) -> EpisodeResult:
    """Paint ``episode_length`` bundles greedily, one CEM search per bundle."""
    env = PaintingEnv(target, seg, gbp, bbox, instance_masks, config=config, scorer=scorer)
    cfg = env.config.optimizer
    while not env.done:
        u = env.current_instance()
        state = env.state(u)
        bundle, _ = optimize_bundle(state, cfg, env.scorer, env.config, env.context(u))
        reward = env.step(bundle, u)
        log.debug("bundle %d instance %d reward %.6g", env.step_index, u, reward.total)
        if on_bundle is not None:
            on_bundle(env)
    return env.result()
