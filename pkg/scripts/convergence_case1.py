#!/usr/bin/env python3
"""Grid-refinement study of the dam break: mid-slice L1 differences.

Usage:
    python scripts/convergence_case1.py [--levels 64 128 256]
"""

import argparse

import numpy as np

from svmflow.fv2d import advance
from svmflow.output import extract_slice
from svmflow.presets import preset_case


def mid_slice(nx: int) -> np.ndarray:
    cfg, grid, fs = preset_case("1", nx=nx, ny=nx)
    while fs.t < cfg.t_end - 1e-14:
        fs = advance(fs, grid, cfg.params, dt_cap=cfg.t_end - fs.t)
    return extract_slice(fs, grid, cfg.params, "y", 4.0)[:, 1]


def coarsen(h: np.ndarray, factor: int) -> np.ndarray:
    return h.reshape(-1, factor).mean(axis=1)


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--levels", type=int, nargs="+",
                        default=[64, 128, 256])
    args = parser.parse_args()
    slices = {nx: mid_slice(nx) for nx in args.levels}
    print(f"{'grid pair':>16}  {'rel L1 diff':>12}")
    for lo, hi in zip(args.levels[:-1], args.levels[1:]):
        coarse = slices[lo]
        fine = coarsen(slices[hi], hi // lo)
        rel = np.sum(np.abs(coarse - fine)) / np.sum(np.abs(fine))
        print(f"{lo:>7} vs {hi:<6}  {rel:>12.5f}")
    return 0


if __name__ == "__main__":
    import sys
    sys.exit(main())
