"""Time the numba kernels against their numpy forms.

    python benchmarks/bench_kernels.py [--size 128] [--strokes 200] [--repeat 3]

Both backends run on identical inputs; the script also reports the largest
output difference so a speedup never hides a mismatch.
"""
import argparse
import time

import numpy as np

from strokepaint import kernels
from strokepaint.stroke import CanvasDims, RenderConfig, StrokeParams, curve_samples


def best_of(fn, args_list, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        for args in args_list:
            fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=128)
    ap.add_argument("--strokes", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if kernels.sweep_density_jit is None:
        raise SystemExit("numba is unavailable (or STROKEPAINT_NO_NUMBA is set); nothing to compare")

    rng = np.random.default_rng(args.seed)
    dims = CanvasDims(args.size, args.size)
    cfg = RenderConfig()
    n = args.size

    sweep_args = []
    for _ in range(args.strokes):
        px, py, alpha, rho = curve_samples(StrokeParams.from_array(rng.random(13)), dims, cfg,
                                           clamp_radius=False)
        sweep_args.append((px, py, alpha, rho, cfg.rho_min, 0.5 * cfg.aa_band, n, n, True))

    img = rng.random((n, n, 3))
    grids = [(img, *rng.uniform(-4, n + 4, (2, n, n))) for _ in range(20)]
    comp = [(rng.random((n, n, 3)), rng.random((n, n)), rng.random(3), rng.random((n, n)), False)
            for _ in range(50)]

    rows = [("sweep_density", kernels.sweep_density_jit, kernels.sweep_density_numpy, sweep_args),
            ("bilinear", kernels.bilinear_jit, kernels.bilinear_numpy, grids),
            ("composite", kernels.composite_jit, kernels.composite_numpy, comp)]

    print(f"{args.size}x{args.size} canvas, best of {args.repeat}")
    print(f"{'kernel':<14} {'calls':>6} {'numba ms/call':>14} {'numpy ms/call':>14} {'speedup':>8} {'max diff':>9}")
    for name, fast, slow, calls in rows:
        fast(*calls[0])  # compile outside the timed region
        diff = max(float(np.abs(fast(*a) - slow(*a)).max()) for a in calls[:10])
        t_fast = best_of(fast, calls, args.repeat) / len(calls) * 1e3
        t_slow = best_of(slow, calls, args.repeat) / len(calls) * 1e3
        print(f"{name:<14} {len(calls):>6} {t_fast:>14.3f} {t_slow:>14.3f} {t_slow / t_fast:>7.1f}x {diff:>9.1e}")


if __name__ == "__main__":
    main()
