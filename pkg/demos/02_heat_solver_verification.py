"""Forward/adjoint heat solvers: convergence order and exact transposition.

The decay mode sin(pi x) sin(pi y) e^{-2 pi^2 t} gives a closed-form
reference; halving mesh width and time step together should divide the
space-time error by about four.  The adjoint sweep is the literal
transpose of the forward map, so duality pairings agree to roundoff and
objective gradients are exact derivatives of the computed value.
"""

import numpy as np

from switch_ocp import heat
from switch_ocp.mesh_fem import SpatialMesh
from switch_ocp.timegrid import TimePartition


def bump(x, y):
    return 1.5 - 2.0 * (x - 0.5) ** 2 - 2.0 * (y - 0.5) ** 2


print("decay-mode convergence (space-time error, trapezoidal norm)")
prev = None
for nx, nt in ((9, 16), (17, 32), (33, 64)):
    mesh = SpatialMesh.unit_square(nx)
    ops = heat.make_heat_operators(mesh, TimePartition.uniform(2.0, nt), [bump])
    nodes = mesh.nodes[mesh.interior]
    y0 = np.sin(np.pi * nodes[:, 0]) * np.sin(np.pi * nodes[:, 1])
    traj = heat.solve_forward(ops, np.zeros((1, nt)), y0)
    exact = np.exp(-2 * np.pi**2 * ops.partition.boundaries)[:, None] * y0[None, :]
    err = np.sqrt(heat.inner_trapezoid(ops, traj - exact, traj - exact))
    ratio = "" if prev is None else f"  ratio {prev / err:.2f}"
    print(f"  nx={nx:3d} nt={nt:3d}  error {err:.3e}{ratio}")
    prev = err

mesh = SpatialMesh.unit_square(9)
ops = heat.make_heat_operators(mesh, TimePartition.uniform(2.0, 16), [bump])
rng = np.random.default_rng(1)
shape = (17, ops.n_dof)
w = rng.standard_normal(shape)
g = rng.standard_normal(shape)
lhs = heat.inner_trapezoid(ops, heat.solve_source(ops, w), g)
rhs = heat.inner_midpoint(ops, w, heat.solve_adjoint(ops, g))
print(f"\nforward/adjoint pairing defect: {abs(lhs - rhs):.2e}")

u = rng.uniform(0.2, 0.8, (1, 16))
y_d = heat.state_map(ops, rng.uniform(0, 1, (1, 16)))
value, grad = heat.objective_and_gradient(ops, u, y_d, 1e-2)
d = rng.standard_normal((1, 16))
h = 1e-4
vp, _ = heat.objective_and_gradient(ops, u + h * d, y_d, 1e-2)
vm, _ = heat.objective_and_gradient(ops, u - h * d, y_d, 1e-2)
print(f"objective value: {value:.6f}")
print(f"directional derivative: exact {heat.control_l2(ops, grad, d):+.10e}")
print(f"                        fd    {(vp - vm) / (2 * h):+.10e}")
