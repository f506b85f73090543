"""Dense reference solvers for very small relaxations.

`dense_active_set_solve` enumerates every sign pattern of the bound and
cut constraints, solves each resulting equality-constrained quadratic
program with dense linear algebra, and returns the feasible candidate of
least objective.  It shares the discrete operators with the production
path but none of its solution machinery (no active-set prediction, no
Krylov method), so it serves as an independent check of the semi-smooth
Newton solver on instances with a handful of coefficients.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from . import heat
from .heat import HeatOperators
from .ssnewton import CutPool

_FEAS_TOL = 1e-9


def euclidean_quadratic(ops: HeatOperators, pool: CutPool, y_d: np.ndarray, alpha: float):
    """Hessian and offset of the objective as a function of the flattened
    coefficients, in plain Euclidean form (length weights absorbed)."""
    n, n_int = ops.n_switches, ops.partition.num_intervals
    dim = n * n_int
    weights = pool.coefficient_weights

    def grad(flat):
        u = flat.reshape(n, n_int)
        _, g = heat.objective_and_gradient(ops, u, y_d, alpha)
        return weights * g.reshape(-1)

    offset = grad(np.zeros(dim))
    hess = np.empty((dim, dim))
    for r in range(dim):
        e = np.zeros(dim)
        e[r] = 1.0
        hess[:, r] = grad(e) - offset
    return hess, offset


def dense_active_set_solve(ops: HeatOperators, pool: CutPool, y_d: np.ndarray,
                           alpha: float):
    """Globally optimal (u, lam, objective) of the box- and cut-constrained
    relaxation by exhaustive active-set enumeration.

    Guarded to at most 8 control coefficients and 4 cuts."""
    n, n_int = ops.n_switches, ops.partition.num_intervals
    dim = n * n_int
    k = len(pool)
    if dim > 8 or k > 4:
        raise ValueError("dense enumeration is limited to tiny instances")

    hess, offset = euclidean_quadratic(ops, pool, y_d, alpha)
    g_mat = pool.matrix().toarray() if k else np.zeros((0, dim))
    b = pool.b

    best = None
    for bounds in product((0, 1, 2), repeat=dim):        # 0: lower, 1: upper, 2: free
        fixed = np.array(bounds)
        free = fixed == 2
        u = np.where(fixed == 1, 1.0, 0.0)
        for cut_bits in product((0, 1), repeat=k):
            act = np.array(cut_bits, dtype=bool)
            nf, na = int(free.sum()), int(act.sum())
            size = nf + na
            mat = np.zeros((size, size))
            rhs = np.zeros(size)
            mat[:nf, :nf] = hess[np.ix_(free, free)]
            rhs[:nf] = -offset[free] - hess[np.ix_(free, ~free)] @ u[~free]
            if na:
                mat[:nf, nf:] = g_mat[np.ix_(act, free)].T
                mat[nf:, :nf] = g_mat[np.ix_(act, free)]
                rhs[nf:] = b[act] - g_mat[np.ix_(act, ~free)] @ u[~free]
            try:
                sol = np.linalg.solve(mat, rhs) if size else np.zeros(0)
            except np.linalg.LinAlgError:
                continue
            u_cand = u.copy()
            u_cand[free] = sol[:nf]
            lam = np.zeros(k)
            lam[act] = sol[nf:]
            if not _kkt_consistent(u_cand, lam, free, fixed, g_mat, b, hess, offset):
                continue
            u_mat = u_cand.reshape(n, n_int)
            value, _ = heat.objective_and_gradient(ops, u_mat, y_d, alpha)
            if best is None or value < best[2]:
                best = (u_mat, lam, value)
    if best is None:
        raise RuntimeError("no KKT-consistent active-set pattern found")
    return best


def _kkt_consistent(u, lam, free, fixed, g_mat, b, hess, offset):
    if np.any(u[free] < -_FEAS_TOL) or np.any(u[free] > 1.0 + _FEAS_TOL):
        return False
    if lam.size and np.any(lam < -_FEAS_TOL):
        return False
    if g_mat.shape[0] and np.any(g_mat @ u - b > _FEAS_TOL):
        return False
    stat = hess @ u + offset + (g_mat.T @ lam if lam.size else 0.0)
    lower = fixed == 0
    upper = fixed == 1
    # at the lower bound the stationarity defect is the multiplier mu_a >= 0,
    # at the upper bound it is -mu_b <= 0
    if np.any(stat[lower] < -_FEAS_TOL) or np.any(stat[upper] > _FEAS_TOL):
        return False
    return True


def random_tiny_problem(seed: int, nt: int = 3, nx: int = 5, alpha: float = 5e-2,
                        with_cut: bool = True):
    """Small seeded relaxation for oracle comparisons.

    The desired state tracks a random target control that may leave the
    box, so bound and cut constraints activate across seeds."""
    from .mesh_fem import SpatialMesh
    from .switchpoly import CuttingPlane
    from .timegrid import Projection, TimePartition

    rng = np.random.default_rng(seed)
    mesh = SpatialMesh.unit_square(nx)
    part = TimePartition.uniform(1.0, nt)
    ops = heat.make_heat_operators(mesh, part, [lambda x, y: 1.0 + x + y])
    target = rng.uniform(-0.4, 1.6, size=(1, nt))
    y_d = heat.solve_forward(ops, target, None)
    pool = CutPool(part, 1)
    if with_cut:
        pi = Projection(part, 1)
        a = np.zeros(nt)
        if nt >= 3:
            a[0], a[1], a[2] = 1.0, -1.0, 1.0   # budget-two style alternating cut
            rhs = 1.0
        else:
            a[1] = 1.0                           # budget-zero style single-index cut
            rhs = 0.0
        pool.add(CuttingPlane(pi, a, rhs))
    return ops, y_d, pool
