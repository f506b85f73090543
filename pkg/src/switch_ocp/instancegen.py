"""Deterministic benchmark instances with a known relaxed optimum.

The desired control is a cubic spline through random knots, pinned at 0
initially and 0.5 at the final time.  The desired state is chosen so
that, before any cutting planes are added, the relaxation is minimized
exactly at that control: the construction plants an adjoint state
-alpha * c * (u_d(t) - 1/2) * sin(pi x1) sin(pi x2), whose terminal
condition holds because u_d ends at one half, and whose pairing with the
form function cancels the Tikhonov term thanks to the calibration
constant c.

Instances are persisted as their generating parameters (flat key=value
text) and rebuilt deterministically; dense arrays are only exported for
debugging.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from . import heat, mesh_fem
from .heat import HeatOperators
from .mesh_fem import SpatialMesh
from .outerloop import ControlProblem
from .switchpoly import SwitchingBudget
from .timegrid import TimePartition

FORM_FUNCTIONS = {
    "quadratic-bump": lambda x, y: 1.5 - 2.0 * (x - 0.5) ** 2 - 2.0 * (y - 0.5) ** 2,
}

# file keys of the persisted instance format; T is the horizon
_SPEC_KEYS = ("seed", "T", "sigma", "nt_fine", "nx", "alpha", "form")
_KEY_TO_FIELD = {"T": "horizon"}


@dataclass(frozen=True)
class InstanceSpec:
    """Generator parameters; two equal specs rebuild bit-identical data."""

    seed: int
    nx: int = 30
    sigma: int = 11
    nt_fine: int = 400
    alpha: float = 1e-2
    horizon: float = 2.0
    form: str = "quadratic-bump"

    def __post_init__(self):
        if self.sigma < 0 or self.nt_fine < max(self.sigma + 1, 1) or self.nx < 3:
            raise ValueError("invalid instance parameters")
        if self.form not in FORM_FUNCTIONS:
            raise ValueError(f"unknown form function {self.form!r}")


@dataclass
class Instance:
    """Generated data on the fine grid."""

    spec: InstanceSpec
    mesh: SpatialMesh
    fine_partition: TimePartition
    knot_times: np.ndarray
    knot_values: np.ndarray
    u_d: np.ndarray              # fine-grid piecewise-constant samples, shape (1, nt_fine)
    y_d: np.ndarray              # nodal space-time array, shape (nt_fine + 1, n_interior)
    pairing_constant: float      # 1 / integral of psi * sin * sin
    clipped: bool                # True when spline samples left [0, 1]

    @property
    def y0(self) -> np.ndarray:
        return np.zeros(self.mesh.interior.size)


def spline_control(spec: InstanceSpec):
    """Natural cubic spline through the random knots and its fine-grid
    midpoint samples clipped to [0, 1].

    Returns (spline, knot_times, knot_values, samples, clipped)."""
    rng = np.random.default_rng(spec.seed)
    interior = np.arange(1, spec.nt_fine)
    jumps = np.sort(rng.choice(interior, size=spec.sigma, replace=False))
    knot_times = np.concatenate([[0.0], jumps * spec.horizon / spec.nt_fine, [spec.horizon]])
    knot_values = np.concatenate([[0.0], rng.uniform(0.0, 1.0, spec.sigma), [0.5]])
    spline = CubicSpline(knot_times, knot_values, bc_type="natural")
    fine = TimePartition.uniform(spec.horizon, spec.nt_fine)
    raw = spline(fine.midpoints())
    clipped = bool(np.any(raw < 0.0) or np.any(raw > 1.0))
    return spline, knot_times, knot_values, np.clip(raw, 0.0, 1.0), clipped


def build_instance(spec: InstanceSpec, ops: HeatOperators | None = None) -> Instance:
    """Assemble the full instance; `ops` may supply prebuilt operators on
    the spec's mesh and fine time grid (they are rebuilt otherwise)."""
    if ops is None:
        mesh = SpatialMesh.unit_square(spec.nx)
        fine = TimePartition.uniform(spec.horizon, spec.nt_fine)
        ops = heat.make_heat_operators(mesh, fine, [FORM_FUNCTIONS[spec.form]])
    else:
        mesh, fine = ops.mesh, ops.partition
        if fine.num_intervals != spec.nt_fine or mesh.nx != spec.nx:
            raise ValueError("operators do not match the instance parameters")

    spline, knot_times, knot_values, samples, clipped = spline_control(spec)
    u_d = samples[None, :]

    psi = FORM_FUNCTIONS[spec.form]
    pairing = mesh_fem.integrate(
        mesh, lambda x, y: psi(x, y) * np.sin(np.pi * x) * np.sin(np.pi * y)
    )
    c = 1.0 / pairing

    # planted adjoint p*(t,x) = -alpha c (u_d(t) - 1/2) sin(pi x1) sin(pi x2);
    # the desired state absorbs dt p* + laplace p*, where the laplacian is
    # -2 pi^2 p* because the spatial profile is a Dirichlet eigenfunction
    nodes = mesh.nodes[mesh.interior]
    eig = np.sin(np.pi * nodes[:, 0]) * np.sin(np.pi * nodes[:, 1])
    tb = fine.boundaries
    factor = spec.alpha * c * (-spline(tb, 1) + 2.0 * np.pi**2 * (spline(tb) - 0.5))
    y_d = heat.solve_forward(ops, u_d, None) + factor[:, None] * eig[None, :]

    return Instance(
        spec=spec,
        mesh=mesh,
        fine_partition=fine,
        knot_times=knot_times,
        knot_values=knot_values,
        u_d=u_d,
        y_d=y_d,
        pairing_constant=c,
        clipped=clipped,
    )


def restrict_trajectory(traj: np.ndarray, nt_fine: int, nt: int) -> np.ndarray:
    """Subsample a fine space-time nodal array at coarse time boundaries."""
    if nt_fine % nt != 0:
        raise ValueError("fine interval count must be divisible by the coarse one")
    return traj[:: nt_fine // nt].copy()


def problem_on_grid(instance: Instance, nt: int, sigma_max: int) -> ControlProblem:
    """Solver-facing relaxation data on a coarse uniform time grid."""
    spec = instance.spec
    coarse = TimePartition.uniform(spec.horizon, nt)
    ops = heat.make_heat_operators(
        instance.mesh, coarse, [FORM_FUNCTIONS[spec.form]], y0=instance.y0
    )
    y_d = restrict_trajectory(instance.y_d, spec.nt_fine, nt)
    return ControlProblem(ops=ops, y_d=y_d, budget=SwitchingBudget(sigma_max))


def write_spec(spec: InstanceSpec, path) -> None:
    lines = [
        f"{key} = {getattr(spec, _KEY_TO_FIELD.get(key, key))}" for key in _SPEC_KEYS
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def read_spec(path) -> InstanceSpec:
    values = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    missing = [key for key in _SPEC_KEYS if key not in values]
    if missing:
        raise ValueError(f"instance spec is missing {missing}")
    return InstanceSpec(
        seed=int(values["seed"]),
        sigma=int(values["sigma"]),
        nt_fine=int(values["nt_fine"]),
        nx=int(values["nx"]),
        alpha=float(values["alpha"]),
        horizon=float(values["T"]),
        form=values["form"],
    )


def export_dense(instance: Instance, path) -> None:
    """Debugging dump of the generated arrays."""
    np.savez_compressed(
        path,
        u_d=instance.u_d,
        y_d=instance.y_d,
        knot_times=instance.knot_times,
        knot_values=instance.knot_values,
        pairing_constant=instance.pairing_constant,
    )
