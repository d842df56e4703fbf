"""Build a periodic curvature, then search the first integral that closes the curve.

The Blaschke-type energy with lambda = 0 on the sphere of curvature 4 has an
explicit periodic curvature for every admissible first integral d.  One
curvature period rotates the curve about a fixed axis by an angle Lambda(d);
when Lambda = 2 pi n / m the curve closes after m periods.

    python3 demos/closed_curve.py
"""

import math

from hopftori import EnergySpec, blaschke_profile, closure_search, curve_stats, el_residual, first_integral_check
from hopftori.curves import progression_angle

RHO = 4.0
spec = EnergySpec.extended_blaschke(0.0)

# A single profile: the first integral is conserved to rounding.
prof = blaschke_profile(RHO, 0.0, 2.0, n_samples=1024)
d_est, dev = first_integral_check(prof)
print(f"profile d=2: period {prof.period:.6f}, kappa in [{prof.kappa.min():.4f}, {prof.kappa.max():.4f}]")
print(f"  first integral {d_est:.15f} (spread {dev:.1e}), equation residual {el_residual(prof):.1e}")
print(f"  progression angle {progression_angle(prof)[0] / math.pi:.6f} pi")

# The angle sweeps past 4 pi / 3 as d grows, so m = 3, n = 2 has a solution.
d_star, curve = closure_search(spec, RHO, 3, 2, n_samples=2048)
stats = curve_stats(curve, spec)
print(f"\nclosed (3, 2) curve at d* = {d_star:.12f}")
print(f"  closure gap {curve.closure_gap:.1e}, length {stats.length:.6f}, energy {stats.energy:.6f}")
print(f"  enclosed area {stats.area:.10f} = {stats.area_over_pi} pi (polygon check {stats.polygon_area:.8f})")
