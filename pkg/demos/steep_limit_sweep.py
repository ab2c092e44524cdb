#!/usr/bin/env python3
"""Watch the surrogate tangent kernel approach its steep-activation limit.

The generalized kernel for erf-type activations converges, as the steepness
grows, to the closed form for the hard sign activation.  The gap shrinks
like 1/steepness.  Off the diagonal everything is finite; on the diagonal
only the surrogate-smoothed kernel stays bounded, which is easy to see in
the last column.
"""

import numpy as np

from sgntk.analytic_kernels import (
    KIND_NTK,
    KIND_SG_NTK,
    erf_spec,
    kernel_matrix,
    kernel_value,
    sign_spec,
)
from sgntk.experiments import angle_grid, sphere_points

pts = sphere_points(angle_grid(64))
ref = sphere_points([0.0])
x = pts[0]

limit = kernel_matrix(sign_spec(KIND_SG_NTK, 2, surrogate2="derf"), pts, ref)
limit = limit.require_finite()[:, 0]
scale = np.abs(limit).max()

print("surrogate-slot kernel, depth 2, gap to the sign limit over 64 angles")
print(f"{'steepness':>9}  {'max |gap|':>10}  {'gap*m':>8}  {'diag value':>10}")
for m in [5, 10, 25, 50, 100, 200]:
    spec = erf_spec(KIND_SG_NTK, 2, float(m), surrogate2="derf")
    curve = kernel_matrix(spec, pts, ref).require_finite()[:, 0]
    gap = np.abs(curve - limit).max()
    diag = float(kernel_value(spec, x, x))
    print(f"{m:>9}  {gap:>10.5f}  {gap * m:>8.3f}  {diag:>10.3f}")

print()
print("same sweep for the plain tangent kernel: the diagonal runs away")
for m in [5, 50, 500]:
    diag = float(kernel_value(erf_spec(KIND_NTK, 2, float(m)), x, x))
    print(f"  steepness {m:>4}: diagonal {diag:10.2f}")
print("(the sign-limit tangent kernel is infinite there; "
      "kernel_matrix flags those cells instead of overflowing)")
