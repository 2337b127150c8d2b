"""Routh's mass threshold for the planar Lagrange triangle, three ways.

Run:  python3 demos/lagrange_routh.py
"""
import numpy as np

from eqlab import apps, spectral

# Reduce the triangle to its two shape coordinates and read off the planar
# model parameters.  Equal masses sit far on the unstable side.
r = apps.lagrange_pipeline([1, 1, 1])
print(f"equal masses: k = {r.k:.6f}, alpha = beta = {r.alpha:.6f}")
print(f"  sqrt(alpha) + sqrt(beta) = {np.sqrt(r.alpha) + np.sqrt(r.beta):.6f}"
      f"  vs  sqrt(2) k = {np.sqrt(2) * r.k:.6f}")
print(f"  routh {r.routh}, curvature test {r.curvature_criterion}, spectrum {r.spectral.verdict}")

# One heavy primary: the three verdicts flip together.
for m1 in (25.0, 50.40, 50.46, 100.0):
    r = apps.lagrange_pipeline([m1, 1, 1])
    print(f"m1 = {m1:7.2f}: ratio {r.routh_ratio:.7f}  routh {r.routh!s:5}  "
          f"curvature {r.curvature_criterion!s:5}  spectrum {r.spectral.verdict}")

# Bisection on the spectral verdict alone recovers 25 + 18 sqrt(2).
x = spectral.find_threshold(lambda m: apps.lagrange_pipeline([m, 1, 1]).spectral.is_stable,
                            (40, 60), xtol=1e-9)
print(f"bisection threshold {x:.9f}, exact {25 + 18 * np.sqrt(2):.9f}")
