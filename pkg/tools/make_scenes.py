"""Regenerate the bundled 128x128 test scenes in src/strokepaint/data/.

Each scene is a target PNG, a foreground mask, and a GBP-style importance
map concentrated on a small distinguishing feature. The ``fruit`` scene also
ships one mask per instance.
"""
from pathlib import Path

import numpy as np
from PIL import Image

SIZE = 128
OUT = Path(__file__).resolve().parents[1] / "src" / "strokepaint" / "data"


def grid():
    yy, xx = np.mgrid[0:SIZE, 0:SIZE] + 0.5
    return xx, yy


def soft(inside_dist, width=1.0):
    # signed distance (positive inside) -> [0, 1] with a 1px ramp
    return np.clip(0.5 + inside_dist / width, 0.0, 1.0)


def ellipse(cx, cy, rx, ry):
    xx, yy = grid()
    r = np.sqrt(((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2)
    return soft((1.0 - r) * min(rx, ry))


def rect(x0, y0, x1, y1):
    xx, yy = grid()
    d = np.minimum.reduce([xx - x0, x1 - xx, yy - y0, y1 - yy])
    return soft(d)


def blob(cx, cy, sigma):
    xx, yy = grid()
    return np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2 * sigma ** 2))


def paint(img, alpha, color):
    a = alpha[:, :, None]
    return img * (1 - a) + a * np.asarray(color, float)


def vertical(top, bottom):
    t = np.linspace(0, 1, SIZE)[:, None, None]
    return np.broadcast_to((1 - t) * np.asarray(top) + t * np.asarray(bottom), (SIZE, SIZE, 3)).copy()


def bird():
    img = vertical([0.45, 0.65, 0.9], [0.75, 0.85, 0.95])
    img = paint(img, rect(0, 100, 128, 128), [0.35, 0.5, 0.25])
    img = paint(img, rect(20, 86, 110, 92), [0.4, 0.28, 0.15])  # branch
    body = ellipse(62, 68, 26, 17)
    head = ellipse(88, 50, 12, 12)
    tail = rect(26, 62, 42, 72)
    beak = rect(99, 48, 108, 53)
    img = paint(img, body, [0.8, 0.35, 0.15])
    img = paint(img, tail, [0.55, 0.25, 0.12])
    img = paint(img, head, [0.85, 0.45, 0.2])
    img = paint(img, beak, [0.95, 0.8, 0.2])
    img = paint(img, ellipse(91, 47, 2.5, 2.5), [0.05, 0.05, 0.05])
    mask = np.maximum.reduce([body, head, tail, beak])
    gbp = blob(93, 48, 4.0)
    return img, mask, gbp, None


def car():
    img = vertical([0.6, 0.75, 0.85], [0.85, 0.85, 0.8])
    img = paint(img, rect(0, 84, 128, 128), [0.3, 0.3, 0.32])
    img = paint(img, rect(0, 104, 128, 107), [0.9, 0.9, 0.85])  # lane marking
    body = rect(18, 62, 110, 88)
    cabin = rect(38, 44, 88, 64)
    w1, w2 = ellipse(38, 88, 10, 10), ellipse(90, 88, 10, 10)
    img = paint(img, body, [0.15, 0.3, 0.7])
    img = paint(img, cabin, [0.2, 0.35, 0.75])
    img = paint(img, rect(44, 48, 82, 60), [0.7, 0.85, 0.95])  # window
    img = paint(img, w1, [0.08, 0.08, 0.08])
    img = paint(img, w2, [0.08, 0.08, 0.08])
    img = paint(img, rect(104, 66, 110, 72), [1.0, 0.9, 0.3])  # headlight
    mask = np.maximum.reduce([body, cabin, w1, w2])
    gbp = blob(107, 69, 3.5)
    return img, mask, gbp, None


def fruit():
    img = vertical([0.9, 0.85, 0.75], [0.8, 0.72, 0.6])
    img = paint(img, rect(0, 80, 128, 128), [0.55, 0.38, 0.22])  # table
    apple = ellipse(42, 72, 20, 19)
    pear = ellipse(88, 74, 17, 21)
    img = paint(img, apple, [0.8, 0.12, 0.1])
    img = paint(img, pear, [0.6, 0.75, 0.2])
    img = paint(img, ellipse(36, 64, 5, 4), [1.0, 0.6, 0.55])  # highlight
    img = paint(img, rect(41, 46, 44, 55), [0.3, 0.2, 0.1])  # stem
    stem = rect(41, 46, 44, 55)
    gbp = blob(42, 52, 3.0)
    return img, np.maximum.reduce([apple, pear, stem]), gbp, [np.maximum(apple, stem), pear]


def save_gray(path, arr):
    Image.fromarray(np.rint(np.clip(arr, 0, 1) * 255).astype(np.uint8), mode="L").save(path)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, fn in (("bird", bird), ("car", car), ("fruit", fruit)):
        img, mask, gbp, instances = fn()
        Image.fromarray(np.rint(np.clip(img, 0, 1) * 255).astype(np.uint8)).save(OUT / f"{name}.png")
        save_gray(OUT / f"{name}_mask.png", mask)
        save_gray(OUT / f"{name}_gbp.png", gbp / gbp.max())
        for i, m in enumerate(instances or []):
            save_gray(OUT / f"{name}_inst{i}.png", m)
    print("wrote", OUT)


if __name__ == "__main__":
    main()
