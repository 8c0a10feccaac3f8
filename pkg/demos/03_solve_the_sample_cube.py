#!/usr/bin/env python3
"""The benchmark problem end to end.

A 4 mm cube is fixed on the x=0 face and loaded with 4 N/mm^2 of
traction along +y over the opposite face (a stubby cantilever). With 16
constant elements per face that is 96 elements and a dense 288x288
system relating boundary displacements to boundary tractions.
"""

import numpy as np

from tribem import assemble, equilibrium_residual, gauss_rule, solve
from tribem.problems import cube_problem

prob = cube_problem(side=4.0, k=2)
print(prob.label)
print(f"elements: {prob.mesh.n_elements}, equations: {prob.mesh.n_dofs}")
print(f"fixed dofs: {prob.bc.displacement_known.sum()}, "
      f"traction dofs: {(~prob.bc.displacement_known).sum()}")
print()

hg = assemble(prob.mesh, prob.material, gauss_rule(16))
sol = solve(hg, prob.bc)

u = sol.u.reshape(-1, 3)
t = sol.t.reshape(-1, 3)
loaded = prob.mesh.centroids[:, 0] == 4.0
fixed = prob.mesh.centroids[:, 0] == 0.0

print("mean displacement on the loaded face (mm):", u[loaded].mean(axis=0))
print("peak |u| anywhere (mm):", np.abs(u).max())
print()

# global force balance: the reaction integrated over the fixed face must
# cancel the 4 N/mm^2 * 16 mm^2 = 64 N applied along y
applied = 4.0 * 16.0
reaction = prob.mesh.areas[fixed] @ t[fixed]
net = equilibrium_residual(sol, prob.mesh)
print(f"applied load:        +{applied:.1f} N along y")
print(f"reaction on fixed face: {reaction[1]:+.3f} N along y")
print(f"net force residual:  {np.linalg.norm(net):.4f} N "
      f"({100 * np.linalg.norm(net) / applied:.2f}% of the load)")
print()

# constant elements converge slowly but monotonically under refinement
print("refinement study (equilibrium residual as % of load):")
for k in (2, 3, 4):
    p = cube_problem(k=k)
    s = solve(assemble(p.mesh, p.material, gauss_rule(16)), p.bc)
    res = np.linalg.norm(equilibrium_residual(s, p.mesh))
    print(f"  k={k}: N={p.mesh.n_elements:4d}  residual {100 * res / applied:.3f}%")
