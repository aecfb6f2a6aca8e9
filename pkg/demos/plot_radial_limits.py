"""
Radial limits and the shrinking finite-limit set
================================================

Iterate the attachment construction for three steps, classify radial
limits along a uniform ray grid, and watch the angular measure of
finite limits shrink while +/- infinity directions fill the circle.
"""

import numpy as np

from scherkdisc import domains as dm
from scherkdisc import fatou as ft
from scherkdisc import meshing as ms
from scherkdisc import solver as sv
from scherkdisc.geometry import HYPERBOLIC, disc

D = disc("hyperbolic")

# warm-up: the harmonic extension of cos(theta) has finite radial
# limits everywhere, so the report assigns the full circle to mu_finite
mesh = ms.triangulate(D, 0.03)
op_h = sv.operator("harmonic", metric=HYPERBOLIC)
bc = sv.BoundaryData.from_function(lambda p: p[:, 0] / np.hypot(p[:, 0], p[:, 1]))
harm = sv.solve(mesh, op_h, bc)
rep = ft.fatou_report(harm, n_rays=64)
print("harmonic: mu_finite =", rep.mu_finite, "(2 pi =", 2 * np.pi, ")")

# the iterated example: each step attaches a perturbed trapezoid pair,
# doubling the portion of the rim carrying divergent boundary data
seq = dm.iterate_example(D, 3)
op = sv.operator("minimal_hyperbolic")
for step in seq.steps:
    m = ms.triangulate(step.polygon, 0.02)
    fields = sv.solve_scherk(step.polygon, op, caps=(5.0, 10.0, 20.0),
                             h=0.02, mesh=m)
    rep = ft.fatou_report(fields[-1], n_rays=256)
    print(f"step {step.index}: sides={step.polygon.n_sides} "
          f"mu_finite={rep.mu_finite:.4f} mu_plus={rep.mu_plus:.4f} "
          f"mu_minus={rep.mu_minus:.4f}")

# the compressed field psi = eta(u) has bounded values, and its total
# variation over growing discs flattens: the hypothesis behind the
# almost-everywhere radial limit theorem at desk scale
psi = ft.compress(fields[-1])
radii = [0.5, 0.8, 0.9, 0.95, 0.99]
tv = ft.tv_integral(psi, radii)
for r, v in zip(radii, tv):
    print(f"TV over geodesic disc of radius {r}: {v:.4f}")
