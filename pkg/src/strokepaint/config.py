"""Flat ``key = value`` configuration covering every tunable default.

Blank lines and ``#`` comments are ignored. Recognised keys (defaults):

    n_samples = 100          curve samples per stroke
    r_max_frac = 0.125       max brush radius / min(H, W)
    rho_min = 0.5            min brush radius, pixels
    aa_band = 2.0            edge falloff width, pixels
    falloff = quintic        quintic | cubic
    masked_attenuation = false
    population = 64
    elite_frac = 0.125
    generations = 30
    init_sigma = 0.25
    seed = 0
    episode_length = 40      bundles per episode
    n_background = 2
    n_foreground = 3
    eta = 2.0
    nu = 10.0
    kappa = 0.0
    mode = bilevel           bilevel | ablation
    aligned = true           zoom onto the bbox for foreground/focus terms
    gbp_norm = frobenius     frobenius | count
    scorer = neg_l2          neg_l2 | neg_l1_down4
    canvas_init = 0.0        constant value of the blank canvas
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

from .rewards import RewardWeights
from .stroke import RenderConfig


@dataclass(frozen=True)
class OptimizerConfig:
    population: int = 64
    elite_frac: float = 0.125
    generations: int = 30
    init_sigma: float = 0.25
    seed: int = 0
    episode_length: int = 40
    n_background: int = 2
    n_foreground: int = 3

    def __post_init__(self):
        if self.population < 4:
            raise ValueError("population must be >= 4")
        if not 0.0 < self.elite_frac < 1.0:
            raise ValueError("elite_frac must lie in (0, 1)")
        if self.n_elite < 1:
            raise ValueError("elite count must be >= 1")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if self.init_sigma <= 0:
            raise ValueError("init_sigma must be positive")
        if self.episode_length < 0:
            raise ValueError("episode_length must be >= 0")
        if self.n_background < 0 or self.n_foreground < 0 or self.bundle_size < 1:
            raise ValueError("bundle needs at least one stroke")

    @property
    def n_elite(self) -> int:
        return int(round(self.elite_frac * self.population))

    @property
    def bundle_size(self) -> int:
        return self.n_background + self.n_foreground


@dataclass(frozen=True)
class PaintConfig:
    render: RenderConfig = field(default_factory=RenderConfig)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    weights: RewardWeights = field(default_factory=RewardWeights)
    mode: str = "bilevel"
    aligned: bool = True
    gbp_norm: str = "frobenius"
    scorer: str = "neg_l2"
    masked_attenuation: bool = False
    canvas_init: float = 0.0

    def __post_init__(self):
        if self.mode not in ("bilevel", "ablation"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.gbp_norm not in ("frobenius", "count"):
            raise ValueError(f"unknown gbp_norm {self.gbp_norm!r}")
        if not 0.0 <= self.canvas_init <= 1.0:
            raise ValueError("canvas_init must lie in [0, 1]")

    def with_overrides(self, **kv) -> PaintConfig:
        """Apply flat keys (as in the config file) on top of this config."""
        groups = {"render": {}, "optimizer": {}, "weights": {}, "top": {}}
        for key, value in kv.items():
            section, typ = _KEYS.get(key, (None, None))
            if section is None:
                raise ValueError(f"unknown config key {key!r}")
            groups[section][key] = _coerce(typ, value, key)
        return replace(
            self,
            render=replace(self.render, **groups["render"]),
            optimizer=replace(self.optimizer, **groups["optimizer"]),
            weights=replace(self.weights, **groups["weights"]),
            **groups["top"],
        )

    @classmethod
    def from_file(cls, path) -> PaintConfig:
        return cls().with_overrides(**parse_config_text(open(path).read()))


def _coerce(typ, value, key):
    if not isinstance(value, str):
        return typ(value)
    if typ is bool:
        low = value.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"{key}: expected a boolean, got {value!r}")
    try:
        return typ(value.strip())
    except ValueError:
        raise ValueError(f"{key}: cannot parse {value!r} as {typ.__name__}") from None


def _build_keys():
    keys = {}
    for section, klass in (("render", RenderConfig), ("optimizer", OptimizerConfig),
                           ("weights", RewardWeights)):
        for f in fields(klass):
            keys[f.name] = (section, {"int": int, "float": float, "str": str}[f.type])
    for f in fields(PaintConfig):
        if f.name not in ("render", "optimizer", "weights"):
            keys[f.name] = ("top", {"bool": bool, "float": float, "str": str}[f.type])
    return keys


def parse_config_text(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        out[key] = value
    return out


_KEYS = _build_keys()
