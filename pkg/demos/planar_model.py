"""The planar quadratic magnetic model: curvature, zero sets and loops.

Run:  python3 demos/planar_model.py [outdir]
"""
import os
import sys

import numpy as np

from eqlab import cli, emcurv, svg

out = sys.argv[1] if len(sys.argv) > 1 else "demo_out"
os.makedirs(out, exist_ok=True)

cases = {"empty": (0.45, 0.45), "hyperbola": (0.9, 0.15),
         "borderline": (0.5, 0.5), "ellipse": (0.6, 0.6)}
for name, (a, b) in cases.items():
    m = emcurv.QuadModel2D(a, b)
    rep = cli.toy_report(m)
    print(f"{name:10} alpha={a} beta={b}: {rep['spectral_class']:20} mane {rep['mane']:13} "
          f"zero set {rep['zero_set']:13} outcome {rep['outcome']}")

    xs = np.linspace(-1.5, 1.5, 61)
    Z = emcurv.curvature_map(m, 0.1, xs, xs)
    zs = emcurv.zero_set(m, 0.1)
    with open(os.path.join(out, f"curvature_{name}.svg"), "w") as fh:
        fh.write(svg.heatmap(xs, xs, Z, emcurv.conic_branches(zs, 400, extent=4.0),
                             "x", "y", f"alpha={a}, beta={b}: {zs.kind}"))

# Below the threshold the ellipse loop has negative free-period action.
for a, b in ((0.45, 0.45), (0.3, 0.5), (1.0, 1.0)):
    m = emcurv.QuadModel2D(a, b)
    S = emcurv.loop_action(m, emcurv.ellipse_loop(m))
    print(f"ellipse loop alpha={a} beta={b}: action {S:+.6f}, closed form "
          f"{emcurv.ellipse_action_closed_form(m):+.6f}")
