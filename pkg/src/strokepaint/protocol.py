"""JSON-lines request/response loop exposing ``PaintingEnv`` to external agents.

Requests, one JSON object per line::

    {"cmd": "reset", "target": PATH, "mask": PATH, "gbp": PATH,
     "bbox": "x,y,w,h" | [x, y, w, h], "instances": [PATH, ...],
     "config": {key: value, ...}}
    {"cmd": "step", "bundle": [13*K reals, background strokes first]}
    {"cmd": "observe"}

Every request gets exactly one response line with ``"ok"`` set; failures
carry ``"error"``.
"""
from __future__ import annotations

import base64
import json
import sys

import numpy as np

from .align import BBox
from .compositor import ActionBundle
from .config import PaintConfig
from .io import SceneAnnotation, load_scene, png_bytes
from .painter import PaintingEnv


class ProtocolError(Exception):
    pass


def _bbox(value):
    if value is None:
        return None
    if isinstance(value, str):
        return BBox.parse(value)
    if isinstance(value, (list, tuple)) and len(value) == 4:
        return BBox(*(int(v) for v in value))
    raise ProtocolError(f"bad bbox {value!r}")


class EnvServer:
    def __init__(self, config: PaintConfig | None = None):
        self.base_config = config or PaintConfig()
        self.env: PaintingEnv | None = None

    def handle(self, req) -> dict:
        if not isinstance(req, dict):
            raise ProtocolError("request must be a JSON object")
        cmd = req.get("cmd")
        if cmd == "reset":
            return self._reset(req)
        if cmd == "step":
            return self._step(req)
        if cmd == "observe":
            return self._observe()
        raise ProtocolError(f"unknown cmd {cmd!r}")

    def _reset(self, req):
        if "target" not in req:
            raise ProtocolError("reset needs a target")
        overrides = req.get("config") or {}
        if not isinstance(overrides, dict):
            raise ProtocolError("config must be an object")
        config = self.base_config.with_overrides(**overrides)
        ann = SceneAnnotation(req["target"], req.get("mask"), _bbox(req.get("bbox")),
                              req.get("gbp"), list(req.get("instances") or []))
        scene = load_scene(ann)
        self.env = PaintingEnv(scene.target, scene.seg, scene.gbp, scene.bbox,
                               scene.instance_masks or None, config=config)
        d = scene.dims
        return {"ok": True, "dims": [d.height, d.width],
                "bundle_size": config.optimizer.bundle_size,
                "n_background": config.optimizer.n_background,
                "n_foreground": config.optimizer.n_foreground}

    def _need_env(self) -> PaintingEnv:
        if self.env is None:
            raise ProtocolError("no scene loaded; send reset first")
        return self.env

    def _step(self, req):
        env = self._need_env()
        if env.done:
            raise ProtocolError("episode is done; send reset")
        vec = req.get("bundle")
        if not isinstance(vec, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in vec):
            raise ProtocolError("bundle must be a list of numbers")
        opt = env.config.optimizer
        bundle = ActionBundle.from_vector(np.array(vec, dtype=float), opt.n_background,
                                          opt.n_foreground)
        reward = env.step(bundle)
        return {"ok": True, "reward": reward.as_dict(), "step": env.step_index, "done": env.done}

    def _observe(self):
        env = self._need_env()
        return {"ok": True, "step": env.step_index,
                "png": base64.b64encode(png_bytes(env.canvas)).decode("ascii")}

    def respond(self, line: str) -> str:
        try:
            out = self.handle(json.loads(line))
        except json.JSONDecodeError as e:
            out = {"ok": False, "error": f"invalid JSON: {e}"}
        except (ProtocolError, ValueError, OSError, TypeError) as e:
            out = {"ok": False, "error": str(e)}
        return json.dumps(out)


def serve(stdin=None, stdout=None, config: PaintConfig | None = None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    server = EnvServer(config)
    for line in stdin:
        if not line.strip():
            continue
        stdout.write(server.respond(line) + "\n")
        stdout.flush()
    return 0
