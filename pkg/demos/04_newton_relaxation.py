"""Solving one cut relaxation with the semi-smooth Newton method.

On a deliberately tiny grid the same problem is also solved by brute
force (enumerating every active-set pattern with dense linear algebra),
so the Newton solution can be checked for optimality and its first-order
conditions inspected term by term.
"""

import numpy as np

from switch_ocp import oracles, ssnewton

alpha = 5e-2
ops, y_d, pool = oracles.random_tiny_problem(seed=0, nt=2, with_cut=True)
print(f"grid: {ops.partition.num_intervals} intervals, "
      f"{ops.n_dof} interior nodes, {len(pool)} cut(s)")

state = ssnewton.solve(
    np.full((1, 2), 0.5), np.zeros(len(pool)), ops, pool, y_d, alpha, 1e-5
)
print(f"\nNewton: converged={state.converged} after {state.iterations} step(s)")
print(f"  control: {state.u.ravel().round(6)}")
print(f"  cut multiplier: {state.lam.round(6)}")
print(f"  objective: {state.objective:.12f}")
print(f"  residual norms: box {state.res_box:.2e}, cuts {state.res_cuts:.2e}")

u_ref, lam_ref, val_ref = oracles.dense_active_set_solve(ops, pool, y_d, alpha)
print(f"\ndense enumeration oracle: objective {val_ref:.12f}")
print(f"  objective gap: {abs(state.objective - val_ref):.2e}")

cert = ssnewton.kkt_certificate(state, ops, pool, y_d, alpha)
print("\nfirst-order certificate (worst defects):")
for name, value in cert.items():
    print(f"  {name:24s} {value:.2e}")
