"""Square and rhombus relative equilibria split into two invariant planes.

Run:  python3 demos/four_body.py
"""
from eqlab import apps

for kind, m in (("square", 1.0), ("rhombus", 0.5), ("rhombus", 2.0)):
    r = apps.four_body_pipeline(kind, m)
    print(f"{kind} m={m}: shape ratio {r.shape_ratio:.6f}, spectrum {r.spectral.verdict}, "
          f"overall {r.overall}")
    for p in r.planes:
        print(f"   plane {p.index}: alpha {p.alpha:.4f}  beta {p.beta:.4f}  "
              f"{p.plane_verdict:9} zero set {p.zero_set}")
