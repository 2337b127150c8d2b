"""Inclination sweeps of the Lagrange triangle in R^4.

Writes one CSV and one SVG per mass choice into the output directory.

Run:  python3 demos/inclined_sweep.py [outdir]
"""
import os
import sys

import numpy as np

from eqlab import cli, spectral, svg

out = sys.argv[1] if len(sys.argv) > 1 else "demo_out"
os.makedirs(out, exist_ok=True)

for masses in ([1, 1, 1], [30, 1, 1], [50.46, 1, 1]):
    rows = spectral.sweep_inclination(masses, 181)
    tag = "_".join(f"{m:g}" for m in masses)
    with open(os.path.join(out, f"sweep_{tag}.csv"), "w", newline="\n") as fh:
        fh.write(cli.sweep_csv(rows))
    with open(os.path.join(out, f"sweep_{tag}.svg"), "w") as fh:
        fh.write(svg.line_plot([r.gamma for r in rows], [r.max_real for r in rows],
                               "gamma (rad)", "max |Re| on E3", f"masses {tag}"))
    stable = [r.gamma for r in rows if r.max_real < 1e-8 * r.norm]
    onset = min(stable) if stable else float("nan")
    print(f"masses {tag:10}: first stable grid angle {onset:.4f} (pi/3 = {np.pi / 3:.4f}), "
          f"verdicts at the ends: {rows[0].verdict}, {rows[-1].verdict}")

# The grid hides where the switch really happens for equal masses.
g = spectral.find_threshold(
    lambda t: spectral.inclined_verdict([1, 1, 1], t).verdict != spectral.UNSTABLE, (0.5, 1.5))
print(f"equal masses, bisected onset: {g:.6f}")
