from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).resolve().parents[1] / "src" / "strokepaint" / "data"
SCENES = ("bird", "car", "fruit")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def scene_paths(name):
    inst = sorted(DATA.glob(f"{name}_inst*.png"))
    return {"target": DATA / f"{name}.png", "mask": DATA / f"{name}_mask.png",
            "gbp": DATA / f"{name}_gbp.png", "instances": inst}
