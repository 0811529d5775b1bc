"""Semantic-guided stroke painting: Bezier stroke rendering, bi-level
compositing, bbox-aligned rewards and a cross-entropy stroke optimizer."""
from ._accel import backend
from .align import BBox, bbox_from_mask, zoom
from .compositor import ActionBundle, apply_bundle
from .config import OptimizerConfig, PaintConfig
from .painter import PaintingEnv, run_episode, select_instance
from .rewards import RewardWeights, get_scorer
from .stroke import CanvasDims, RenderConfig, StrokeParams, rasterize_density

__version__ = "0.1.0"
