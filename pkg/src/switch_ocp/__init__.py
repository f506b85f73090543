"""Outer approximation with cutting planes for parabolic optimal control
under combinatorial switching constraints.

The package is organized bottom-up: time partitions and projections
(`timegrid`), spatial finite elements (`mesh_fem`), heat-equation
forward/adjoint solvers (`heat`), the switching polytope and its
separation oracle (`switchpoly`), the semi-smooth Newton solver for one
relaxation (`ssnewton`), the outer approximation loop (`outerloop`),
seeded benchmark instances (`instancegen`), and a command-line harness
(`cli`).
"""

from .heat import (
    HeatOperators,
    apply_psi_star,
    make_heat_operators,
    objective_and_gradient,
    solve_adjoint,
    solve_forward,
    state_map,
)
from .instancegen import Instance, InstanceSpec, build_instance, problem_on_grid
from .mesh_fem import SpatialMesh, assemble, load_vector
from .outerloop import (
    BoundLogRecord,
    ControlProblem,
    OuterConfig,
    choose_projection,
    run,
)
from .ssnewton import ActiveSets, CutPool, NewtonState, SolverCaps
from .switchpoly import (
    CuttingPlane,
    SwitchingBudget,
    enumerate_vertices,
    separate,
    separate_bruteforce,
    shift_count,
)
from .timegrid import (
    Control,
    Projection,
    TimePartition,
    adjoint_embed,
    project,
    refine_dyadic,
)

__all__ = [
    "ActiveSets",
    "BoundLogRecord",
    "Control",
    "ControlProblem",
    "CutPool",
    "CuttingPlane",
    "HeatOperators",
    "Instance",
    "InstanceSpec",
    "NewtonState",
    "OuterConfig",
    "Projection",
    "SolverCaps",
    "SpatialMesh",
    "SwitchingBudget",
    "TimePartition",
    "adjoint_embed",
    "apply_psi_star",
    "assemble",
    "build_instance",
    "choose_projection",
    "enumerate_vertices",
    "load_vector",
    "make_heat_operators",
    "objective_and_gradient",
    "problem_on_grid",
    "project",
    "refine_dyadic",
    "run",
    "separate",
    "separate_bruteforce",
    "shift_count",
    "solve_adjoint",
    "solve_forward",
    "state_map",
]
__version__ = "0.1.0"
