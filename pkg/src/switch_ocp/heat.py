"""Discrete heat-equation solvers for switched source control.

The source is sum_j u_j(t) psi_j(x) with u piecewise constant in time;
states are continuous and piecewise linear in time (Crank-Nicolson with
a cached factorization of the time-step matrix).  Space uses P1 elements
with boundary unknowns eliminated.

The adjoint solver is the exact algebraic transpose of the forward map:
objective values use the trapezoidal rule in time for the tracking norm,
and the backward sweep is driven by dual loads chosen so that the
trapezoidal nodal weights are reproduced exactly.  Gradients returned by
`objective_and_gradient` are therefore exact derivatives of the computed
value, not merely consistent discretizations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from . import mesh_fem
from .mesh_fem import SpatialMesh
from .timegrid import Control, TimePartition


@dataclass(eq=False)
class HeatOperators:
    """Assembled discrete operators for one mesh / time-grid pair.

    Immutable after construction (identity semantics); forward and
    adjoint solves allocate their own work arrays, so shared instances
    are safe across threads.
    """

    mesh: SpatialMesh
    partition: TimePartition
    psi_loads: np.ndarray           # (n_dof, n_switches) form-function load vectors
    y0: np.ndarray                  # initial state, interior nodes
    mass: sp.csr_matrix = field(repr=False)
    stiffness: sp.csr_matrix = field(repr=False)
    _steps: dict = field(default_factory=dict, repr=False)
    _zeta: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_switches(self) -> int:
        return self.psi_loads.shape[1]

    @property
    def n_dof(self) -> int:
        return self.psi_loads.shape[0]

    def step_solver(self, dt: float):
        """LU of (M + dt/2 K) and the matrix (M - dt/2 K), cached per dt."""
        key = float(dt)
        hit = self._steps.get(key)
        if hit is None:
            left = (self.mass + 0.5 * dt * self.stiffness).tocsc()
            right = (self.mass - 0.5 * dt * self.stiffness).tocsr()
            hit = (splu(left), right)
            self._steps[key] = hit
        return hit

    @property
    def zeta(self) -> np.ndarray:
        """Trajectory of the uncontrolled equation started from y0."""
        if self._zeta is None:
            zero = np.zeros((self.n_switches, self.partition.num_intervals))
            self._zeta = solve_forward(self, zero, self.y0)
        return self._zeta


def make_heat_operators(
    mesh: SpatialMesh,
    partition: TimePartition,
    forms,
    y0: np.ndarray | None = None,
) -> HeatOperators:
    """Assemble operators for form functions given as callables f(x, y)
    or as precomputed full-length load vectors."""
    mass_full, stiff_full = mesh_fem.assemble(mesh)
    idx = mesh.interior
    loads = []
    for psi in forms:
        vec = np.asarray(psi, dtype=float) if isinstance(psi, np.ndarray) else mesh_fem.load_vector(mesh, psi)
        if vec.size == mesh.nodes.shape[0]:
            vec = vec[idx]
        elif vec.size != idx.size:
            raise ValueError("load vector has neither full nor interior length")
        loads.append(vec)
    psi_loads = np.column_stack(loads)
    if y0 is None:
        y0 = np.zeros(idx.size)
    ops = HeatOperators(
        mesh=mesh,
        partition=partition,
        psi_loads=psi_loads,
        y0=np.asarray(y0, dtype=float),
        mass=mesh_fem.interior_matrix(mass_full, mesh),
        stiffness=mesh_fem.interior_matrix(stiff_full, mesh),
    )
    # factor every step matrix up front; solves then never mutate shared state
    for dt in np.unique(partition.lengths):
        ops.step_solver(dt)
    return ops


def as_coefficients(u) -> np.ndarray:
    return u.coefficients if isinstance(u, Control) else np.atleast_2d(np.asarray(u, dtype=float))


def trapezoid_weights(partition: TimePartition) -> np.ndarray:
    """Nodal quadrature weights of the composite trapezoidal rule."""
    dt = partition.lengths
    w = np.zeros(partition.num_intervals + 1)
    w[:-1] += 0.5 * dt
    w[1:] += 0.5 * dt
    return w


def solve_forward(ops: HeatOperators, u, y0: np.ndarray | None = None) -> np.ndarray:
    """March the controlled heat equation: one Crank-Nicolson step per
    interval, the piecewise-constant source integrated exactly.

    Returns nodal interior values at every time boundary, shape
    (N+1, n_dof).  y0 = None starts from zero (the pure source-to-state
    map)."""
    coeff = as_coefficients(u)
    dt = ops.partition.lengths
    n_steps = ops.partition.num_intervals
    traj = np.empty((n_steps + 1, ops.n_dof))
    traj[0] = 0.0 if y0 is None else y0
    for i in range(n_steps):
        lu, right = ops.step_solver(dt[i])
        rhs = right @ traj[i] + dt[i] * (ops.psi_loads @ coeff[:, i])
        traj[i + 1] = lu.solve(rhs)
    return traj


def solve_source(ops: HeatOperators, w: np.ndarray) -> np.ndarray:
    """Source-to-state map for a trajectory-shaped (piecewise linear in
    time, nodal in space) source: per step the source integral is
    dt * M (w_{i-1} + w_i) / 2."""
    dt = ops.partition.lengths
    n_steps = ops.partition.num_intervals
    traj = np.empty_like(w)
    traj[0] = 0.0
    for i in range(n_steps):
        lu, right = ops.step_solver(dt[i])
        rhs = right @ traj[i] + dt[i] * (ops.mass @ (0.5 * (w[i] + w[i + 1])))
        traj[i + 1] = lu.solve(rhs)
    return traj


def solve_adjoint(ops: HeatOperators, g: np.ndarray) -> np.ndarray:
    """Backward-in-time sweep that is the exact transpose of the forward
    source-to-state map.

    The trajectory functional sum_l w_l <g_l, y_l>_M (trapezoidal nodal
    weights w_l) is rewritten as per-interval dual loads by the backward
    recursion sigma_i = 2 w_i M g_i - sigma_{i+1}; the Crank-Nicolson
    sweep from p(T) = 0 then satisfies, for every forward solve y driven
    by interval sources s_i,

        sum_l w_l <g_l, y_l>_M  =  sum_i s_i . (p_{i-1} + p_i)/2 .

    In particular pairing the result with psi-load sources reproduces the
    exact gradient of the trapezoidal tracking term.
    """
    g = np.asarray(g, dtype=float)
    dt = ops.partition.lengths
    n_steps = ops.partition.num_intervals
    w = trapezoid_weights(ops.partition)
    traj = np.empty_like(g)
    traj[n_steps] = 0.0
    sigma = np.zeros(ops.n_dof)
    for i in range(n_steps, 0, -1):
        lu, right = ops.step_solver(dt[i - 1])
        sigma = 2.0 * w[i] * (ops.mass @ g[i]) - sigma
        traj[i - 1] = lu.solve(right @ traj[i] + sigma)
    return traj


def apply_psi_star(ops: HeatOperators, w: np.ndarray) -> np.ndarray:
    """Pair a trajectory with the form functions, averaged per interval.

    Entry (j, i) is the mean over I_i of <psi_j, w(t)>, i.e. the
    piecewise-constant control-space representative of the functional
    u -> <Psi u, w>."""
    mid = 0.5 * (w[:-1] + w[1:])
    return ops.psi_loads.T @ mid.T


def state_map(ops: HeatOperators, u) -> np.ndarray:
    """Affine control-to-state map: forward solve from the stored y0."""
    return solve_forward(ops, u, ops.y0)


def inner_trapezoid(ops: HeatOperators, v: np.ndarray, w: np.ndarray) -> float:
    """Space-time product with mass-weighted space and trapezoidal time."""
    weights = trapezoid_weights(ops.partition)
    return float(np.sum(weights * np.einsum("lm,lm->l", v, (ops.mass @ w.T).T)))


def inner_midpoint(ops: HeatOperators, v: np.ndarray, w: np.ndarray) -> float:
    """Space-time product evaluated at interval midpoints; this is the
    pairing in which forward and adjoint sweeps are exact transposes, and
    it coincides with the exact L2 product whenever one factor is
    piecewise constant in time."""
    vm = 0.5 * (v[:-1] + v[1:])
    wm = 0.5 * (w[:-1] + w[1:])
    return float(np.sum(ops.partition.lengths * np.einsum("lm,lm->l", vm, (ops.mass @ wm.T).T)))


def control_l2(ops: HeatOperators, u: np.ndarray, v: np.ndarray) -> float:
    """L2(0,T; R^n) product of two coefficient arrays on ops' grid."""
    return float(np.sum(ops.partition.lengths * u * v))


def objective_and_gradient(ops: HeatOperators, u, y_d: np.ndarray, alpha: float):
    """Tracking objective and its exact discrete gradient.

    value = 1/2 ||S u - y_d||^2 (trapezoidal in time, mass in space)
          + alpha/2 ||u - 1/2||^2 (piecewise-constant control norm);
    gradient = PsiStar(adjoint(S u - y_d)) + alpha (u - 1/2), expressed in
    the piecewise-constant control space."""
    coeff = as_coefficients(u)
    if y_d.shape != (ops.partition.num_intervals + 1, ops.n_dof):
        raise ValueError("desired state does not match the space-time grid")
    traj = state_map(ops, coeff)
    resid = traj - y_d
    value = 0.5 * inner_trapezoid(ops, resid, resid)
    value += 0.5 * alpha * control_l2(ops, coeff - 0.5, coeff - 0.5)
    p = solve_adjoint(ops, resid)
    grad = apply_psi_star(ops, p) + alpha * (coeff - 0.5)
    return value, grad
