import numpy as np
import pytest

from strokepaint.align import BBox
from strokepaint.compositor import ActionBundle, apply_bundle
from strokepaint.config import OptimizerConfig, PaintConfig
from strokepaint.painter import (EpisodeState, PaintingEnv, optimize_bundle, run_episode,
                                 select_instance)
from strokepaint.rewards import RewardContext, neg_l2_score

SMALL = OptimizerConfig(population=12, elite_frac=0.25, generations=4, episode_length=4)


def small(**kw):
    return PaintConfig(optimizer=OptimizerConfig(**{**SMALL.__dict__, **kw}))


def scene(rng, size=32):
    target = rng.random((size, size, 3)) * 0.3 + np.array([0.6, 0.3, 0.1])
    seg = np.zeros((size, size))
    seg[8:24, 10:22] = 1.0
    gbp = np.zeros((size, size))
    gbp[12:16, 12:16] = 1.0
    return target, seg, gbp


def test_select_instance_examples(rng):
    I = rng.random((16, 16, 3))
    masks = [rng.random((16, 16)) for _ in range(3)]
    assert select_instance(I, I.copy(), masks) == 0
    a, b = np.zeros((16, 16)), np.zeros((16, 16))
    a[:8], b[8:] = 1.0, 1.0
    C = I.copy()
    C[12, 3] += 0.5
    assert select_instance(I, C, [a, b]) == 1
    with pytest.raises(ValueError):
        select_instance(I, C, [])
    with pytest.raises(ValueError):
        select_instance(I, C, [np.ones((8, 8))])


def test_select_instance_brute_force(rng):
    I, C = rng.random((2, 16, 16, 3))
    for _ in range(20):
        masks = [rng.random((16, 16)) * (rng.random((16, 16)) > 0.5) for _ in range(3)]
        brute = [np.sqrt(sum(np.sum((m * (I[..., c] - C[..., c])) ** 2) for c in range(3)))
                 for m in masks]
        assert select_instance(I, C, masks) == int(np.argmax(brute))


def test_state_validation(rng):
    t, s, g = scene(rng)
    with pytest.raises(ValueError):
        EpisodeState(np.zeros((16, 16, 3)), t, s, g)
    with pytest.raises(ValueError):
        EpisodeState(np.zeros_like(t), t, s, g, step=-1)
    st = EpisodeState(np.zeros_like(t), t, s, g)
    assert st.bbox == BBox(0, 0, 32, 32)


def test_canvas_equal_target_gives_noop(rng):
    t, s, g = scene(rng)
    state = EpisodeState(t.copy(), t, s, g)
    bundle, reward = optimize_bundle(state, SMALL, neg_l2_score)
    assert reward.total == 0.0
    assert np.array_equal(apply_bundle(t, bundle, s), t)


def test_single_color_target_positive(rng):
    t = np.zeros((64, 64, 3)) + np.array([0.9, 0.2, 0.4])
    ones = np.ones((64, 64))
    state = EpisodeState(np.zeros_like(t), t, ones, ones)
    cfg = OptimizerConfig()
    bundle, reward = optimize_bundle(state, cfg, neg_l2_score)
    assert reward.total > 0 and reward.background >= 0
    # a hand-built candidate: one wide stroke of the target color
    hand = np.full(13 * 5, 0.5)
    hand[6:8] = 0.0
    hand[13 * 4:13 * 5] = [0.1, 0.5, 0.5, 0.5, 0.9, 0.5, 1, 1, 1, 1, 0.9, 0.2, 0.4]
    ctx = RewardContext(neg_l2_score, t, ones, ones, state.bbox)
    nxt = apply_bundle(state.canvas, ActionBundle.from_vector(hand, 2, 3), ones)
    assert ctx.reward(ctx.terms(state.canvas), ctx.terms(nxt)).total > 0


def test_optimize_deterministic(rng):
    t, s, g = scene(rng)
    state = EpisodeState(np.zeros_like(t), t, s, g, step=3)
    b1, r1 = optimize_bundle(state, SMALL, neg_l2_score)
    b2, r2 = optimize_bundle(state, SMALL, neg_l2_score)
    assert np.array_equal(b1.to_vector(), b2.to_vector()) and r1 == r2


def test_zero_length_episode(rng):
    t, s, g = scene(rng)
    res = run_episode(t, s, g, config=small(episode_length=0))
    assert not res.canvas.any() and res.strokes == [] and res.rewards == []


def test_one_bundle_logs_k_strokes(rng):
    t, s, g = scene(rng)
    res = run_episode(t, s, g, config=small(episode_length=1))
    roles = [r.role for r in res.strokes]
    assert roles == ["background"] * 2 + ["foreground"] * 3
    assert all(r.step == 0 and r.instance == 0 for r in res.strokes)


def test_episode_invariants(rng):
    t, s, g = scene(rng)
    cfg = small(episode_length=5)
    res = run_episode(t, s, g, config=cfg)
    scores = res.scores
    assert all(b >= a for a, b in zip(scores, scores[1:]))
    total_b = sum(r.reward.background for r in res.rewards)
    assert total_b == pytest.approx(scores[-1] - scores[0], rel=1e-9)
    total_f = sum(r.reward.focus for r in res.rewards)
    assert total_f == pytest.approx(res.initial_gbp_distance - res.rewards[-1].gbp_distance, rel=1e-9)
    assert len(res.strokes) == 5 * 5
    for step in range(5):
        roles = [r.role for r in res.strokes if r.step == step]
        assert roles.count("background") == 2 and roles.count("foreground") == 3
    again = run_episode(t, s, g, config=cfg)
    assert np.array_equal(again.canvas, res.canvas)
    assert [r.params for r in again.strokes] == [r.params for r in res.strokes]


def test_custom_split_and_canvas_init(rng):
    t, s, g = scene(rng)
    cfg = small(episode_length=1, n_background=0, n_foreground=2).with_overrides(canvas_init=1.0)
    env = PaintingEnv(t, s, g, config=cfg)
    assert np.all(env.canvas == 1.0)
    res = run_episode(t, s, g, config=cfg)
    assert [r.role for r in res.strokes] == ["foreground"] * 2


def test_multi_instance_schedule(rng):
    t, _, g = scene(rng)
    a, b = np.zeros((32, 32)), np.zeros((32, 32))
    a[2:12, 2:12] = 1.0
    b[18:30, 16:30] = 1.0
    env = PaintingEnv(t, None, g, instance_masks=[a, b], config=small(episode_length=3))
    chosen = []
    while not env.done:
        u = env.current_instance()
        assert u == select_instance(t, env.canvas, [a, b])
        chosen.append(u)
        bundle, _ = optimize_bundle(env.state(u), env.config.optimizer, env.scorer,
                                    env.config, env.context(u))
        env.step(bundle, u)
    assert [r.instance for r in env.rewards] == chosen
    # 14x12 box, ceil(0.05 * extent) = 1 extra pixel per axis, on the far side
    assert env.context(1).bbox == BBox(16, 18, 15, 13)


def test_env_noop_step_zero_reward(rng):
    t, s, g = scene(rng)
    env = PaintingEnv(t, s, g, config=small())
    r = env.step(ActionBundle.noop(2, 3))
    assert (r.background, r.foreground, r.focus, r.total) == (0.0, 0.0, 0.0, 0.0)
    assert env.step_index == 1 and not env.canvas.any()


def test_optimizer_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(population=3)
    with pytest.raises(ValueError):
        OptimizerConfig(population=4, elite_frac=0.1)
    with pytest.raises(ValueError):
        OptimizerConfig(generations=0)
    with pytest.raises(ValueError):
        OptimizerConfig(n_background=0, n_foreground=0)
    assert OptimizerConfig().n_elite == 8
