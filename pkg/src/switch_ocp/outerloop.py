"""Outer approximation loop: solve, separate, cut, warm start.

Each round solves the current relaxation, projects the solution onto the
chosen partition, and asks the separation oracle for the most violated
alternating inequality.  A violated cut is appended to the pool and the
next solve warm-starts from the previous control and multipliers; the
loop stops when the family-maximal violation of every switch falls below
max(rel_tol * rhs, abs_floor), so lower bounds from the relaxations are
never compromised.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import ssnewton, switchpoly
from .heat import HeatOperators
from .ssnewton import CutPool, NewtonState, SolverCaps
from .switchpoly import SwitchingBudget
from .timegrid import Control, Projection, TimePartition, project

STATUS_CONVERGED = "converged"
STATUS_CUT_CAP = "cut_cap"
STATUS_NEWTON_FAILURE = "newton_failure"


@dataclass
class OuterConfig:
    """Parameters of the outer loop.

    The stopping threshold is max(cut_tol_rel * rhs, cut_tol_abs); the
    absolute floor matters when the cut right-hand side is zero (budget
    one, where one percent of the right-hand side degenerates)."""

    alpha: float
    rho: float = 1e-5
    cut_tol_rel: float = 0.01
    cut_tol_abs: float = 1e-6
    max_cuts: int = 200
    newton: SolverCaps = field(default_factory=SolverCaps)
    projection: str = "grid"          # "grid" or "dyadic"
    batch_per_switch: bool = False    # add one cut per violated switch

    def __post_init__(self):
        if self.alpha <= 0 or self.rho <= 0:
            raise ValueError("alpha and rho must be positive")
        if self.cut_tol_rel < 0 or self.cut_tol_abs <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_cuts < 1:
            raise ValueError("need room for at least one cut")
        if self.projection not in ("grid", "dyadic"):
            raise ValueError("projection strategy must be 'grid' or 'dyadic'")


@dataclass
class BoundLogRecord:
    """One row of the bound trace."""

    iteration: int
    cpu_seconds: float
    lower_bound: float
    max_violation: float
    num_cuts: int
    bv_seminorm: tuple


@dataclass
class ControlProblem:
    """Relaxation data: discrete operators, desired state, switching budget."""

    ops: HeatOperators
    y_d: np.ndarray
    budget: SwitchingBudget


def bv_seminorm(row: np.ndarray) -> float:
    """Total variation of one switch, counting the jump from the
    pre-horizon off state."""
    return float(np.abs(np.diff(np.concatenate([[0.0], row]))).sum())


def choose_projection(k: int, config: OuterConfig, grid: TimePartition,
                      n_switches: int) -> Projection:
    """Partition used for separation in round k.

    The grid strategy always projects onto the control grid itself (the
    separation oracle is fast enough, so no refinement is needed); the
    dyadic strategy walks a nested sequence of uniform bisections whose
    max/min length ratio is 1, capped at the finest level aligned with
    the control grid."""
    if config.projection == "grid":
        return Projection(grid, n_switches)
    n_int = grid.num_intervals
    max_level = 0
    while n_int % 2 == 0:
        n_int //= 2
        max_level += 1
    level = min(k, max_level)
    return Projection(TimePartition.uniform(grid.horizon, 2**level, level), n_switches)


def run(problem: ControlProblem, config: OuterConfig):
    """Iterate solve / separate / cut until feasibility or the cut cap.

    Returns (final NewtonState, bound log, status).  Newton failures end
    the loop early with whatever log has accumulated."""
    ops = problem.ops
    n = ops.n_switches
    pool = CutPool(ops.partition, n)
    u = np.full((n, ops.partition.num_intervals), 0.5)
    lam = np.zeros(0)
    log: list[BoundLogRecord] = []
    state: NewtonState | None = None
    t_start = time.process_time()

    for k in range(config.max_cuts + 1):
        state = ssnewton.solve(u, lam, ops, pool, problem.y_d,
                               config.alpha, config.rho, config.newton)
        if not state.converged:
            _append_record(log, k, t_start, state, np.nan, pool)
            return state, log, STATUS_NEWTON_FAILURE

        pi = choose_projection(k, config, ops.partition, n)
        projected = project(pi, Control(np.clip(state.u, 0.0, 1.0), ops.partition))
        cut, violation, per_switch = switchpoly.separate_control(
            projected, problem.budget, pi
        )
        _append_record(log, k, t_start, state, violation, pool)

        threshold = max(config.cut_tol_rel * problem.budget.cut_rhs, config.cut_tol_abs)
        if cut is None or np.all(per_switch <= threshold):
            return state, log, STATUS_CONVERGED
        if k == config.max_cuts:
            return state, log, STATUS_CUT_CAP

        if config.batch_per_switch:
            added = 0
            block = pi.partition.num_intervals
            for j in np.flatnonzero(per_switch > threshold):
                res = switchpoly.separate(projected[j * block:(j + 1) * block],
                                          problem.budget)
                coeffs, rhs, _ = res
                full = np.zeros(pi.dim)
                full[j * block:(j + 1) * block] = coeffs
                pool.add(switchpoly.CuttingPlane(pi, full, rhs))
                added += 1
        else:
            pool.add(cut)
            added = 1
        u = state.u
        lam = np.concatenate([state.lam, np.zeros(added)])

    return state, log, STATUS_CUT_CAP


def _append_record(log, k, t_start, state, violation, pool):
    log.append(
        BoundLogRecord(
            iteration=k,
            cpu_seconds=time.process_time() - t_start,
            lower_bound=state.objective,
            max_violation=float(violation),
            num_cuts=len(pool),
            bv_seminorm=tuple(bv_seminorm(row) for row in state.u),
        )
    )
