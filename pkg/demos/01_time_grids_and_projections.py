"""Time partitions, dyadic refinement, and local-averaging projections.

A switching control is piecewise constant on a partition of (0, T).
Coarser partitions induce averaging projections whose Riesz embeddings
pair exactly with controls; this duality is what lets cutting planes act
on projected coefficients without touching the PDE discretization.
"""

import numpy as np

from switch_ocp.timegrid import (
    Control,
    Projection,
    TimePartition,
    adjoint_embed,
    control_inner,
    expand_to,
    project,
    refine_dyadic,
)

part = TimePartition.uniform(2.0, 4)
print("base partition:", part.boundaries)

fine = refine_dyadic(part)
finer = refine_dyadic(fine)
print("after two bisections:", finer.boundaries)
print("nested in the base grid:", finer.is_refinement_of(part))
print("max/min interval ratio:", finer.quasi_uniformity)

rng = np.random.default_rng(0)
u = Control(rng.uniform(0, 1, (1, finer.num_intervals)), finer)
pi = Projection(part, n_switches=1)
averages = project(pi, u)
print("\ncontrol on 16 intervals, averaged onto 4:", averages.round(4))

a = rng.uniform(-1, 1, pi.dim)
lhs = control_inner(expand_to(adjoint_embed(pi, a), finer), u)
rhs = a @ averages
print("embedding duality <embed(a), u> vs a . project(u):")
print(f"  {lhs:.15f} vs {rhs:.15f}  (difference {abs(lhs - rhs):.2e})")
