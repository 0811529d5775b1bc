"""Command line: paint, render, env, check."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .align import BBox
from .config import PaintConfig
from .io import (SceneAnnotation, load_scene, read_gray, read_stroke_log, replay, write_png,
                 write_reward_log, write_stroke_log)
from .painter import PaintingEnv, optimize_bundle
from .stroke import CanvasDims

CHECKPOINTS = (10, 20, 30, 50, 100, 200)


def _dims(text: str) -> CanvasDims:
    try:
        h, w = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims must be HxW, got {text!r}") from None
    try:
        return CanvasDims(h, w)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _bbox(text: str) -> BBox:
    try:
        return BBox.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _paths(text: str) -> list[str]:
    return [p for p in text.split(",") if p]


def _config(args) -> PaintConfig:
    cfg = PaintConfig.from_file(args.config) if args.config else PaintConfig()
    if getattr(args, "seed", None) is not None:
        cfg = cfg.with_overrides(seed=args.seed)
    return cfg


def cmd_paint(args) -> int:
    cfg = _config(args)
    scene = load_scene(SceneAnnotation(args.target, args.mask, args.bbox, args.gbp,
                                       args.instances or []))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    env = PaintingEnv(scene.target, scene.seg, scene.gbp, scene.bbox,
                      scene.instance_masks or None, config=cfg)
    pending = list(CHECKPOINTS)
    while not env.done:
        u = env.current_instance()
        bundle, _ = optimize_bundle(env.state(u), cfg.optimizer, env.scorer, cfg, env.context(u))
        env.step(bundle, u)
        n = len(env.strokes)
        while pending and pending[0] <= n:
            k = pending.pop(0)
            canvas = env.canvas if k == n else replay(env.strokes[:k], scene.dims, scene.seg,
                                                      scene.instance_masks, cfg)
            write_png(out / f"strokes_{k:03d}.png", canvas)
        if not args.quiet:
            r = env.rewards[-1]
            print(f"bundle {env.step_index}/{cfg.optimizer.episode_length} instance {r.instance} "
                  f"reward {r.reward.total:.5f} score {r.score:.5f}", file=sys.stderr)
    write_png(out / "final.png", env.canvas)
    write_stroke_log(out / "strokes.jsonl", env.strokes)
    write_reward_log(out / "rewards.jsonl", env.rewards)
    return 0


def cmd_render(args) -> int:
    cfg = _config(args)
    records = read_stroke_log(args.strokes)
    seg = read_gray(args.mask) if args.mask else None
    masks = [read_gray(p) for p in (args.instances or [])]
    for what, arr in [("mask", seg)] + [("instance mask", m) for m in masks]:
        if arr is not None and arr.shape != args.dims.shape:
            raise ValueError(f"{what} dims {arr.shape} do not match --dims {args.dims.shape}")
    write_png(args.out, replay(records, args.dims, seg, masks, cfg))
    return 0


def cmd_env(args) -> int:
    from .protocol import serve
    return serve(config=_config(args))


def cmd_check(args) -> int:
    from . import checks
    failed = 0
    for c in checks.ALL_CHECKS:
        res = c()
        print(res.line())
        failed += not res.ok
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="strokepaint", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    pp = sub.add_parser("paint", help="paint a target image")
    pp.add_argument("--target", required=True)
    pp.add_argument("--mask")
    pp.add_argument("--gbp")
    pp.add_argument("--bbox", type=_bbox, help="x,y,w,h in pixels")
    pp.add_argument("--instances", type=_paths, help="comma-separated instance mask PNGs")
    pp.add_argument("--config")
    pp.add_argument("--seed", type=int)
    pp.add_argument("--out", required=True, help="output directory")
    pp.add_argument("-q", "--quiet", action="store_true")
    pp.set_defaults(func=cmd_paint)

    pr = sub.add_parser("render", help="replay a stroke log onto a blank canvas")
    pr.add_argument("--strokes", required=True)
    pr.add_argument("--dims", required=True, type=_dims, help="HxW")
    pr.add_argument("--mask")
    pr.add_argument("--instances", type=_paths)
    pr.add_argument("--config")
    pr.add_argument("--out", required=True, help="output PNG")
    pr.set_defaults(func=cmd_render)

    pe = sub.add_parser("env", help="JSON-lines environment on stdin/stdout")
    pe.add_argument("--config")
    pe.set_defaults(func=cmd_env)

    pc = sub.add_parser("check", help="run oracle and smoothness self-checks")
    pc.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"strokepaint: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
