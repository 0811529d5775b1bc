"""Scene ingestion, PNG in/out, stroke/reward logs and log replay."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .align import BBox, bbox_from_mask
from .compositor import apply_stroke
from .config import PaintConfig
from .painter import INSTANCE_PAD, RewardRecord, StrokeLogRecord
from .stroke import N_PARAMS, CanvasDims, StrokeParams

log = logging.getLogger(__name__)

ROLES = ("background", "foreground")


@dataclass
class SceneAnnotation:
    target: str
    mask: str | None = None
    bbox: BBox | None = None
    gbp: str | None = None
    instances: list[str] = field(default_factory=list)


@dataclass
class Scene:
    """Decoded scene, ready for ``PaintingEnv``."""
    target: np.ndarray
    seg: np.ndarray
    gbp: np.ndarray
    bbox: BBox
    instance_masks: list[np.ndarray] = field(default_factory=list)

    @property
    def dims(self) -> CanvasDims:
        return CanvasDims.of(self.target)


def _open(path) -> Image.Image:
    try:
        img = Image.open(path)
        img.load()
    except (OSError, ValueError) as e:
        raise ValueError(f"cannot read image {path}: {e}") from None
    return img


def read_rgb(path) -> np.ndarray:
    return np.asarray(_open(path).convert("RGB"), dtype=float) / 255.0


def read_gray(path) -> np.ndarray:
    img = _open(path)
    if img.mode in ("I;16", "I;16B", "I;16L", "I"):
        arr = np.asarray(img, dtype=float)
        return arr / (65535.0 if arr.max() > 255 else 255.0)
    return np.asarray(img.convert("L"), dtype=float) / 255.0


def to_uint8(img: np.ndarray) -> np.ndarray:
    """Round-to-nearest quantization of ``255 * value``."""
    return np.rint(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)


def png_bytes(img: np.ndarray) -> bytes:
    import io
    buf = io.BytesIO()
    Image.fromarray(to_uint8(img)).save(buf, format="PNG")
    return buf.getvalue()


def write_png(path, img: np.ndarray):
    Path(path).write_bytes(png_bytes(img))


def load_scene(ann: SceneAnnotation) -> Scene:
    target = read_rgb(ann.target)
    dims = CanvasDims.of(target)

    def checked(arr, what):
        if arr.shape != dims.shape:
            raise ValueError(f"{what} dims {arr.shape} do not match target {dims.shape}")
        return arr

    if ann.mask is not None:
        seg = checked(read_gray(ann.mask), "mask")
    else:
        log.warning("no mask given; painting with a full-image foreground")
        seg = np.ones(dims.shape)

    if ann.gbp is not None:
        gbp = checked(read_gray(ann.gbp), "GBP map")
        peak = gbp.max()
        if peak <= 0:
            raise ValueError(f"GBP map {ann.gbp} is all zero")
        gbp = gbp / peak
    else:
        gbp = np.ones(dims.shape)

    instances = [checked(read_gray(p), f"instance mask {p}") for p in ann.instances]

    if ann.bbox is not None:
        bbox = ann.bbox.validate(dims)
    elif ann.mask is not None:
        bbox = bbox_from_mask(seg, 0.5, INSTANCE_PAD)
    else:
        bbox = BBox.full(dims)
    return Scene(target, seg, gbp, bbox, instances)


# -- logs ------------------------------------------------------------------
# json writes floats with repr(), which round-trips binary64 exactly

def stroke_record_to_json(rec: StrokeLogRecord) -> str:
    return json.dumps({"step": rec.step, "role": rec.role, "instance": rec.instance,
                       "params": list(rec.params), "reward": rec.reward})


def stroke_record_from_json(line: str) -> StrokeLogRecord:
    d = json.loads(line)
    try:
        params = tuple(float(v) for v in d["params"])
        rec = StrokeLogRecord(int(d["step"]), str(d["role"]), int(d.get("instance", 0)),
                              params, dict(d.get("reward", {})))
    except (KeyError, TypeError, ValueError) as e:
        raise ValueError(f"malformed stroke record: {e}") from None
    if rec.role not in ROLES:
        raise ValueError(f"unknown stroke role {rec.role!r}")
    if len(params) != N_PARAMS:
        raise ValueError(f"stroke record needs {N_PARAMS} params, got {len(params)}")
    StrokeParams(*params)  # range check
    return rec


def reward_record_to_json(rec: RewardRecord) -> str:
    d = {"step": rec.step, "instance": rec.instance}
    d.update(rec.reward.as_dict())
    d["score"] = rec.score
    d["gbp_distance"] = rec.gbp_distance
    return json.dumps(d)


def write_jsonl(path, lines):
    with open(path, "w") as f:
        for line in lines:
            f.write(line + "\n")


def write_stroke_log(path, records):
    write_jsonl(path, (stroke_record_to_json(r) for r in records))


def write_reward_log(path, records):
    write_jsonl(path, (reward_record_to_json(r) for r in records))


def read_stroke_log(path) -> list[StrokeLogRecord]:
    out = []
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                out.append(stroke_record_from_json(line))
            except ValueError as e:
                raise ValueError(f"{path}:{lineno}: {e}") from None
    return out


def replay(records, dims: CanvasDims, seg: np.ndarray | None = None,
           instance_masks=None, config: PaintConfig | None = None) -> np.ndarray:
    """Re-render a stroke log from a blank canvas.

    Each record is composited with the mask it was painted under: its
    instance mask when instance masks are given, ``seg`` otherwise.
    """
    config = config or PaintConfig()
    seg = np.ones(dims.shape) if seg is None else np.asarray(seg, dtype=float)
    masks = [np.asarray(m, dtype=float) for m in (instance_masks or [])]
    canvas = np.full((dims.height, dims.width, 3), config.canvas_init)
    for rec in records:
        if masks:
            if not 0 <= rec.instance < len(masks):
                raise ValueError(f"record refers to instance {rec.instance}, "
                                 f"only {len(masks)} masks given")
            m = masks[rec.instance]
        else:
            m = seg
        canvas = apply_stroke(canvas, rec.role, StrokeParams(*rec.params), m,
                              config.render, config.masked_attenuation)
    return canvas
