#!/usr/bin/env python3
"""Does a trained ensemble of sign networks behave like the predicted GP?

Trains a small ensemble with the surrogate rule, then compares the ensemble
mean and spread against the generalized-kernel GP posterior on a ring of
test angles.  Desk-scale version of the headline experiment; bump WIDTH,
COUNT and STEPS for tighter agreement.
"""

import numpy as np

from sgntk.experiments import run_fig3

WIDTH = 128
COUNT = 30
STEPS = 3000

report = run_fig3(width=WIDTH, count=COUNT, steps=STEPS, grid_size=32, seed=0)
header, band = report.table("band")
col = {name: header.index(name) for name in header}

ens_mean = np.array([r[col["ensemble_mean"]] for r in band])
ens_std = np.array([r[col["ensemble_std"]] for r in band])
gp_mean = np.array([r[col["gp_mean"]] for r in band])
gp_std = np.array([r[col["gp_std"]] for r in band])
angles = np.array([r[col["angle"]] for r in band])

gap = np.abs(ens_mean - gp_mean)
inside = gap <= 2 * gp_std + 3 * ens_std / np.sqrt(COUNT)

print(f"{COUNT} networks, width {WIDTH}, {STEPS} steps")
print(f"mean |ensemble - GP| over 32 angles: {gap.mean():.4f}")
print(f"angles inside the 2-sigma band:      {inside.sum()}/{inside.size}")
print()
print(f"{'angle':>6}  {'ensemble':>9}  {'GP mean':>9}  {'2*sigma':>8}  in?")
for i in range(0, 32, 4):
    mark = "yes" if inside[i] else "NO"
    print(f"{angles[i]:>6.2f}  {ens_mean[i]:>9.4f}  {gp_mean[i]:>9.4f}  "
          f"{2 * gp_std[i]:>8.4f}  {mark}")
