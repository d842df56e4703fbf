"""Lift the closed (3, 2) curve through the Hopf map and check the flat torus over it.

The torus swept by the fibers over a closed curve in S^2(4) is flat and its
mean curvature is half the curve's geodesic curvature.  The horizontal lift
comes back rotated by a phase equal to minus twice the enclosed area, so here
it closes only after several traverses.

    python3 demos/hopf_torus.py [outdir]
"""

import sys
from pathlib import Path

import numpy as np

from hopftori import export, hopf_torus, horizontal_lift, verify_vertical_geometry
from hopftori.curves import curve_stats
from hopftori.verify import gamma32

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")

_, prof, curve = gamma32()
area = curve_stats(curve, prof.spec).area
lift = horizontal_lift(curve)
print(f"holonomy per traverse {lift.holonomy_per_cover:+.10f}, minus twice the area {-2 * area:+.10f}")
print(f"lift closes after {lift.m_cover} traverses; horizontality defect {lift.horizontality():.1e}")

mesh = hopf_torus(lift, m_covers=1, n_t=128)
rep, H, K = verify_vertical_geometry(mesh, prof)
print(rep.to_text())

# Thin the grid before writing: the OBJ is for viewing, not for analysis.
small = hopf_torus(lift, n_t=32)
small.vertices = np.ascontiguousarray(small.vertices[::16])
print("wrote", export(small, "obj", out / "hopf_torus.obj"))
