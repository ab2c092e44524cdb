#!/usr/bin/env python3
"""Posterior mean under gradient-flow dynamics, from prior to interpolation.

The kernel-GP view of training gives the predictor in closed form at any
training time t.  This walks t from 0 to infinity at one test point and
shows the exponential approach to the interpolating limit, plus the
learning-rate threshold above which discrete training would diverge.
"""

import numpy as np

from sgntk.analytic_kernels import KIND_NTK, erf_spec
from sgntk.experiments import make_sphere_dataset, sphere_points, target_polynomial
from sgntk.gp_regression import (
    check_learning_rate,
    eta_critical,
    gp_posterior,
    gram_spectrum,
    posterior_mean,
    posterior_std,
)

data = make_sphere_dataset(15, seed=3)
spec = erf_spec(KIND_NTK, 3, 2.0)
x = sphere_points([2.0])
truth = float(target_polynomial(x[0]))

print(f"test angle 2.0, true target {truth:.4f}")
print(f"{'t':>8}  {'mean':>8}  {'std':>7}")
for t in [0.0, 1.0, 5.0, 20.0, 100.0, 1000.0, np.inf]:
    gp = gp_posterior(spec, data, t=t, eta=0.1)
    mu = float(posterior_mean(gp, x)[0, 0])
    sd = float(posterior_std(gp, x)[0])
    label = "inf" if np.isinf(t) else f"{t:g}"
    print(f"{label:>8}  {mu:>8.4f}  {sd:>7.4f}")

lo, hi = gram_spectrum(spec, data.inputs)
print(f"\nkernel Gram spectrum on the training set: [{lo:.4f}, {hi:.4f}]")
print(f"critical learning rate 2(min+max): {eta_critical(lo, hi):.4f}")
import warnings
for eta in (0.1, 50.0):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        check_learning_rate(eta, spec, data.inputs)
    print(f"eta={eta:g}: {'warns' if caught else 'fine'}")
