#!/usr/bin/env python3
"""Interpolation vs approximation on the classic trouble data sets.

Runs both fitters on the hump-and-flat set and on noisy unevenly spaced line
data, writing dense curves for plotting.  Interpolation oscillates to pass
through every point; the approximation follows the suggested shape.
"""

import argparse
from pathlib import Path

import numpy as np

from cvb import FitConfig, cvb_approximate, cvb_interpolate, eval_model_1d
from cvb.synthetic import gen_humped_flat, gen_noisy_line


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", type=Path, default=Path("out/pathological"))
    parser.add_argument("--seed", type=int, default=7, help="noisy-line seed")
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    grid = np.linspace(-1.0, 1.0, 1001)
    datasets = {
        "humped_flat": gen_humped_flat(),
        "noisy_line": gen_noisy_line(args.seed),
    }
    for name, samples in datasets.items():
        np.savetxt(args.out_dir / f"{name}_points.csv",
                   np.column_stack([samples.x, samples.y]),
                   delimiter=",", header="x,y", comments="")
        for label, fitter in (("interp", cvb_interpolate), ("approx", cvb_approximate)):
            model, _ = fitter(samples, FitConfig(epsilon=0.0, max_terms=samples.m))
            curve = eval_model_1d(model, grid)
            np.savetxt(args.out_dir / f"{name}_{label}.csv",
                       np.column_stack([grid, curve]),
                       delimiter=",", header="x,P(x)", comments="")
            overshoot = max(curve.max() - samples.y.max(), samples.y.min() - curve.min())
            print(f"{name:12s} {label:6s}: overshoot beyond data range = {overshoot:.4f}")
    print(f"curves written to {args.out_dir}/")


if __name__ == "__main__":
    main()
