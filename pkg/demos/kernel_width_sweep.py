#!/usr/bin/env python3
"""How fast does the empirical tangent kernel settle onto the analytic one?

Sweeps network width at fixed depth and steepness, measures the mean squared
gap between the empirical kernel curve and its infinite-width counterpart on
a ring of test angles, and prints a small table.  The ~1/width decay is the
whole point.
"""

import numpy as np

from sgntk.analytic_kernels import KIND_NTK, erf_spec, kernel_matrix
from sgntk.experiments import angle_grid, empirical_curve, sphere_points
from sgntk.network import NetworkConfig, init
from sgntk.activations import make_erf_m
from sgntk.rng import derive_seed

DEPTH = 3
STEEPNESS = 2.0
WIDTHS = [10, 100, 300, 1000]
SEEDS = range(8)
GRID = 64

angles = angle_grid(GRID)
spec = erf_spec(KIND_NTK, DEPTH, STEEPNESS)
analytic = kernel_matrix(spec, sphere_points(angles), sphere_points([0.0]))
analytic = analytic.require_finite()[:, 0]

print(f"depth {DEPTH}, erf steepness {STEEPNESS}, {GRID} angles, "
      f"{len(list(SEEDS))} seeds per width")
print(f"{'width':>6}  {'mean MSE':>10}  {'mean/first':>10}")

means = []
for width in WIDTHS:
    mses = []
    for seed in SEEDS:
        cfg = NetworkConfig(
            widths=(2,) + (width,) * (DEPTH - 1) + (1,),
            sigma_w=1.0, sigma_b=0.1, activation=make_erf_m(STEEPNESS),
            seed=derive_seed(seed, "width-sweep", width),
        )
        curve = empirical_curve(init(cfg), angles)
        mses.append(np.mean((curve - analytic) ** 2))
    means.append(float(np.mean(mses)))
    print(f"{width:>6}  {means[-1]:>10.5f}  {means[-1] / means[0]:>10.4f}")

slope = np.polyfit(np.log(WIDTHS), np.log(means), 1)[0]
print(f"fitted log-log slope of MSE vs width: {slope:.2f} (expect about -1)")
