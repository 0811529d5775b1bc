import numpy as np
import pytest

from strokepaint.align import BBox
from strokepaint.compositor import ActionBundle, apply_bundle
from strokepaint.rewards import (RewardContext, RewardWeights, background_reward, focus_reward,
                                 foreground_reward_aligned, foreground_reward_unaligned,
                                 gbp_distance, get_scorer, neg_l1_down4_score, neg_l2_score,
                                 total_reward)
from strokepaint.stroke import CanvasDims


def img(v, shape=(16, 16, 3)):
    return np.full(shape, v, dtype=float)


def test_neg_l2_examples(rng):
    x = rng.random((16, 16, 3))
    assert neg_l2_score(x, x) == 0.0
    assert neg_l2_score(img(0), img(1)) == -1.0
    assert neg_l2_score(img(0), img(0.5)) == -0.25
    with pytest.raises(ValueError):
        neg_l2_score(img(0), img(0, (8, 16, 3)))


def test_scorers_self_similarity_maximal(rng):
    for name in ("neg_l2", "neg_l1_down4"):
        s = get_scorer(name)
        for _ in range(5):
            x, y = rng.random((2, 16, 16, 3))
            assert s(x, x) >= s(x, y)
            assert -1.0 <= s(x, y) <= 0.0
    with pytest.raises(ValueError):
        get_scorer("wgan")


def test_down4_scorer_blocks():
    x = np.zeros((8, 8, 3))
    y = np.zeros((8, 8, 3))
    y[0, 0] = 1.0  # one pixel of a 4x4 block -> block mean 1/16
    assert neg_l1_down4_score(x, y) == pytest.approx(-1 / 16 / 4)


def test_background_reward_examples(rng):
    s = neg_l2_score
    I, C = rng.random((2, 16, 16, 3))
    assert background_reward(s, I, C, C) == 0.0
    assert background_reward(s, I, C, I) > 0
    assert background_reward(s, img(1), img(0), img(0.5)) == 0.75


def test_foreground_unaligned_examples(rng):
    s = neg_l2_score
    I, C, N = rng.random((3, 16, 16, 3))
    seg = rng.random((16, 16))
    assert foreground_reward_unaligned(s, I, C, C, seg) == 0.0
    assert foreground_reward_unaligned(s, I, C, N, np.zeros((16, 16))) == 0.0
    assert foreground_reward_unaligned(s, I, C, N, np.ones((16, 16))) == background_reward(s, I, C, N)


def test_foreground_aligned_examples(rng):
    s = neg_l2_score
    d16 = CanvasDims(16, 16)
    I, C, N = rng.random((3, 16, 16, 3))
    seg = rng.random((16, 16))
    assert foreground_reward_aligned(s, I, C, C, seg, BBox(2, 3, 8, 9)) == 0.0
    full = foreground_reward_aligned(s, I, C, N, np.ones((16, 16)), BBox.full(d16))
    assert full == background_reward(s, I, C, N)

    I, C = rng.random((2, 64, 64, 3))
    N = C.copy()
    N[:15] = rng.random((15, 64, 3))
    N[:, 49:] = rng.random((64, 15, 3))
    seg = rng.random((64, 64))
    assert foreground_reward_aligned(s, I, C, N, seg, BBox(16, 16, 32, 32)) == 0.0


def test_gbp_distance_examples(rng):
    I, C = rng.random((2, 8, 8, 3))
    g = rng.random((8, 8))
    assert gbp_distance(g, I, I) == 0.0
    one = np.zeros((8, 8))
    one[2, 5] = 1.0
    a, b = np.zeros((8, 8, 3)), np.zeros((8, 8, 3))
    b[2, 5] = 1.0
    assert gbp_distance(one, a, b) == 3.0
    with pytest.raises(ValueError):
        gbp_distance(np.zeros((8, 8)), I, C)
    assert gbp_distance(g, I, C) >= 0


def test_gbp_scale_property(rng):
    I, C = rng.random((2, 8, 8, 3))
    g = rng.random((8, 8))
    assert gbp_distance(3.0 * g, I, C) == pytest.approx(3.0 * gbp_distance(g, I, C), rel=1e-12)


def test_gbp_count_norm():
    one = np.zeros((8, 8))
    one[2, 5] = 0.5
    one[1, 1] = 0.5
    a, b = np.zeros((8, 8, 3)), np.zeros((8, 8, 3))
    b[2, 5] = 1.0
    # numerator 3 * 0.25, two non-zero pixels
    assert gbp_distance(one, a, b, norm="count") == 0.375
    with pytest.raises(ValueError):
        gbp_distance(one, a, b, norm="median")


def test_focus_examples():
    assert focus_reward(0.7, 0.7) == 0.0
    assert focus_reward(3.0, 0.0) == 3.0
    assert focus_reward(0.2, 0.5) == pytest.approx(-0.3)


def test_total_examples():
    r = total_reward(0.1, 0.05, 0.02, RewardWeights(2, 10))
    assert r.total == 0.4
    assert total_reward(0.0, 0.0, 0.0).total == 0.0
    assert total_reward(0.1, 0.7, 0.02, RewardWeights(kappa=5), mode="ablation").total == 0.2
    with pytest.raises(ValueError):
        total_reward(0, 0, 0, mode="other")
    with pytest.raises(ValueError):
        RewardWeights(eta=float("inf"))


def test_breakdown_recompute(rng):
    w = RewardWeights(1.5, 7.0, 3.0)
    for mode in ("bilevel", "ablation"):
        b, f, g = rng.normal(size=3)
        r = total_reward(b, f, g, w, mode)
        assert r.recompute(w) == r.total


def _random_sequence(rng, n=12):
    canvas = np.zeros((32, 32, 3))
    seg = rng.random((32, 32))
    out = [canvas]
    for _ in range(n):
        out.append(apply_bundle(out[-1], ActionBundle.from_vector(rng.random(26), 1, 1), seg))
    return out, seg


@pytest.mark.parametrize("aligned", [True, False])
def test_telescoping(rng, aligned):
    I = rng.random((32, 32, 3))
    seq, seg = _random_sequence(rng)
    g = rng.random((32, 32))
    ctx = RewardContext(neg_l2_score, I, seg, g, BBox(4, 6, 20, 18), aligned=aligned)
    terms = [ctx.terms(c) for c in seq]
    rewards = [ctx.reward(a, b) for a, b in zip(terms, terms[1:])]
    for attr, first, last in (("background", terms[0].background, terms[-1].background),
                              ("foreground", terms[0].foreground, terms[-1].foreground)):
        total = sum(getattr(r, attr) for r in rewards)
        assert total == pytest.approx(last - first, rel=1e-9, abs=1e-15)
    assert sum(r.focus for r in rewards) == pytest.approx(terms[0].gbp - terms[-1].gbp, rel=1e-9)


def test_context_matches_free_functions(rng):
    I, C, N = rng.random((3, 32, 32, 3))
    seg, g = rng.random((2, 32, 32))
    bb = BBox(3, 5, 17, 22)
    ctx = RewardContext(neg_l2_score, I, seg, g, bb)
    r = ctx.reward(ctx.terms(C), ctx.terms(N))
    assert r.background == pytest.approx(background_reward(neg_l2_score, I, C, N), abs=1e-14)
    assert r.foreground == pytest.approx(
        foreground_reward_aligned(neg_l2_score, I, C, N, seg, bb), abs=1e-14)


def test_zero_step_zero_reward(rng):
    I, C = rng.random((2, 32, 32, 3))
    seg, g = rng.random((2, 32, 32))
    ctx = RewardContext(neg_l2_score, I, seg, g, BBox(0, 0, 16, 16))
    t = ctx.terms(C)
    r = ctx.reward(t, ctx.terms(C.copy()))
    assert (r.background, r.foreground, r.focus, r.total) == (0.0, 0.0, 0.0, 0.0)


def test_context_without_gbp_mass_has_no_focus(rng):
    g = np.zeros((32, 32))
    g[30, 30] = 1.0
    ctx = RewardContext(neg_l2_score, rng.random((32, 32, 3)), np.ones((32, 32)), g, BBox(0, 0, 8, 8))
    r = ctx.reward(ctx.terms(np.zeros((32, 32, 3))), ctx.terms(np.ones((32, 32, 3))))
    assert r.focus == 0.0 and r.background != 0.0
