#!/usr/bin/env python3
"""Regenerate the CSV bundles that feed the plotting package.

Writes desk-scale versions of every table the figure tool consumes: the
kernel-convergence curves and their MSE summaries, the two analytic kernel
curves (finite steepness vs the sign limit), and a trained-ensemble band.
Everything is seeded, so reruns are byte-identical; the plotting package
pins its tests to these files.

Usage: python3 demos/export_figure_data.py [out_dir]   (default: figure_data)
"""

import sys
from pathlib import Path

from sgntk.analytic_kernels import KIND_SG_NTK, erf_spec, sign_spec
from sgntk.experiments import kernel_table, run_fig1, run_fig2, run_fig3, write_report
from sgntk.tableio import write_csv

out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "figure_data")
out_dir.mkdir(parents=True, exist_ok=True)

# kernel-convergence runs: init-only is enough for the convergence story
for runner in (run_fig1, run_fig2):
    report = runner(widths=(10, 100, 1000), m_values=(2,), seeds=(0, 1, 2),
                    steps=0, grid_size=64)
    for path in write_report(report, out_dir).values():
        print(f"wrote {path}")

# the two analytic curves behind the steep-limit comparison
steep = erf_spec(KIND_SG_NTK, 2, 100.0, surrogate2="derf")
limit = sign_spec(KIND_SG_NTK, 2, surrogate2="derf")
for name, spec in [("kernel_steep100", steep), ("kernel_sign_limit", limit)]:
    header, rows = kernel_table(spec, 64)
    write_csv(out_dir / f"{name}.csv", header, rows)
    print(f"wrote {out_dir / f'{name}.csv'}")

# a small trained ensemble with its GP band
report = run_fig3(width=64, count=20, steps=2000, grid_size=64, seed=0)
for path in write_report(report, out_dir).values():
    print(f"wrote {path}")
