"""Release-gate checks: oracle equivalences and structural invariants.

Each check returns (name, passed, detail); `run_all` executes the suite
and is what the command-line `validate` subcommand prints.  The checks
call the public solver entry points through their modules, so a broken
build (or an injected fault in a test fixture) fails loudly here.
"""

from __future__ import annotations

import numpy as np

from . import heat, oracles, ssnewton, switchpoly
from .mesh_fem import SpatialMesh
from .switchpoly import SwitchingBudget
from .timegrid import TimePartition


def _result(name, passed, detail):
    return name, bool(passed), detail


def check_separation_exhaustive(max_len: int = 12):
    """Fast separation equals brute force on every binary pattern with up
    to `max_len` entries, budgets 1..3, and its cuts hold on every
    feasible pattern."""
    worst = 0.0
    for sigma in (1, 2, 3):
        budget = SwitchingBudget(sigma)
        for m in range(1, max_len + 1):
            codes = np.arange(2**m)
            table = ((codes[:, None] >> np.arange(m)) & 1).astype(float)
            vertices = switchpoly.enumerate_vertices(m, budget)
            for row_idx in range(table.shape[0]):
                w = table[row_idx]
                fast = switchpoly.separate(w, budget)
                brute = switchpoly.separate_bruteforce(w, budget)
                if (fast is None) != (brute is None):
                    return _result(
                        "separation_exhaustive", False,
                        f"presence mismatch at m={m} sigma={sigma} w={w}",
                    )
                if fast is None:
                    continue
                gap = abs(fast[2] - brute[2])
                worst = max(worst, gap)
                if gap != 0.0:
                    return _result(
                        "separation_exhaustive", False,
                        f"violation mismatch {gap} at m={m} sigma={sigma}",
                    )
                if np.max(vertices @ fast[0]) > fast[1]:
                    return _result(
                        "separation_exhaustive", False,
                        f"cut invalid on a feasible pattern, m={m} sigma={sigma}",
                    )
    return _result("separation_exhaustive", True, f"max violation gap {worst:.1e}")


def check_separation_random(samples: int = 300, max_len: int = 12):
    """Fast separation equals brute force on random fractional points."""
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(samples):
        m = int(rng.integers(1, max_len + 1))
        sigma = int(rng.integers(1, 4))
        w = rng.uniform(0.0, 1.0, m)
        fast = switchpoly.separate(w, SwitchingBudget(sigma))
        brute = switchpoly.separate_bruteforce(w, SwitchingBudget(sigma))
        if (fast is None) != (brute is None):
            return _result("separation_random", False, f"presence mismatch m={m} sigma={sigma}")
        if fast is not None:
            worst = max(worst, abs(fast[2] - brute[2]))
    passed = worst <= 1e-12
    return _result("separation_random", passed, f"max violation gap {worst:.1e}")


def _test_operators(nx=9, nt=16):
    mesh = SpatialMesh.unit_square(nx)
    part = TimePartition.uniform(2.0, nt)
    return heat.make_heat_operators(
        mesh, part,
        [lambda x, y: 1.5 - 2.0 * (x - 0.5) ** 2 - 2.0 * (y - 0.5) ** 2],
    )


def check_adjoint_identities(pairs: int = 10):
    """Forward/adjoint and source/control duality pairings agree."""
    ops = _test_operators()
    rng = np.random.default_rng(11)
    shape = (ops.partition.num_intervals + 1, ops.n_dof)
    worst = 0.0
    for _ in range(pairs):
        w = rng.standard_normal(shape)
        g = rng.standard_normal(shape)
        lhs = heat.inner_trapezoid(ops, heat.solve_source(ops, w), g)
        rhs = heat.inner_midpoint(ops, w, heat.solve_adjoint(ops, g))
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), 1e-300))
        u = rng.standard_normal((ops.n_switches, ops.partition.num_intervals))
        lhs2 = heat.inner_trapezoid(ops, heat.solve_forward(ops, u, None), g)
        rhs2 = heat.control_l2(
            ops, u, heat.apply_psi_star(ops, heat.solve_adjoint(ops, g))
        )
        worst = max(worst, abs(lhs2 - rhs2) / max(abs(lhs2), 1e-300))
    return _result("adjoint_identities", worst < 1e-12, f"max relative defect {worst:.1e}")


def check_gradient(directions: int = 5):
    """Reported gradient matches central differences of the value."""
    ops = _test_operators()
    rng = np.random.default_rng(23)
    shape = (ops.n_switches, ops.partition.num_intervals)
    u = rng.uniform(0.2, 0.8, shape)
    y_d = heat.solve_forward(ops, rng.uniform(0.0, 1.0, shape), None)
    value, grad = heat.objective_and_gradient(ops, u, y_d, 1e-2)
    h = 1e-4
    worst = 0.0
    for _ in range(directions):
        d = rng.standard_normal(shape)
        vp, _ = heat.objective_and_gradient(ops, u + h * d, y_d, 1e-2)
        vm, _ = heat.objective_and_gradient(ops, u - h * d, y_d, 1e-2)
        fd = (vp - vm) / (2 * h)
        exact = heat.control_l2(ops, grad, d)
        worst = max(worst, abs(fd - exact) / max(abs(exact), 1e-300))
    return _result("gradient_fd", worst < 1e-6, f"max relative defect {worst:.1e}")


def check_tiny_kkt(seeds=(0, 1, 2)):
    """Newton solution matches dense enumeration on tiny relaxations."""
    worst_obj = 0.0
    worst_cert = 0.0
    for seed in seeds:
        nt = 2 + seed % 2
        ops, y_d, pool = oracles.random_tiny_problem(seed, nt=nt, with_cut=seed % 2 == 0)
        alpha = 5e-2
        u_ref, lam_ref, val_ref = oracles.dense_active_set_solve(ops, pool, y_d, alpha)
        state = ssnewton.solve(
            np.full_like(u_ref, 0.5), np.zeros(len(pool)), ops, pool, y_d,
            alpha, 1e-5,
        )
        if not state.converged:
            return _result("tiny_kkt_oracle", False, f"Newton failed on seed {seed}")
        worst_obj = max(worst_obj, abs(state.objective - val_ref) / max(abs(val_ref), 1e-300))
        cert = ssnewton.kkt_certificate(state, ops, pool, y_d, alpha)
        worst_cert = max(worst_cert, max(cert.values()))
    passed = worst_obj <= 1e-9 and worst_cert <= 1e-8
    return _result(
        "tiny_kkt_oracle", passed,
        f"objective gap {worst_obj:.1e}, certificate defect {worst_cert:.1e}",
    )


def check_complementarity(cases=((0, 2), (1, 3))):
    """Residuals vanish at independently computed optima (the two-interval
    cases keep their cut active, so a wrong multiplier sign is caught)."""
    worst = 0.0
    for seed, nt in cases:
        ops, y_d, pool = oracles.random_tiny_problem(seed, nt=nt, with_cut=True)
        alpha = 5e-2
        u_ref, lam_ref, _ = oracles.dense_active_set_solve(ops, pool, y_d, alpha)
        f_box, f_cuts = ssnewton.residual(u_ref, lam_ref, ops, pool, y_d, alpha, 1e-5)
        worst = max(worst, float(np.max(np.abs(f_box))), float(np.max(np.abs(f_cuts), initial=0.0)))
    return _result("complementarity_residual", worst <= 1e-8, f"max residual {worst:.1e}")


ALL_CHECKS = (
    check_separation_exhaustive,
    check_separation_random,
    check_adjoint_identities,
    check_gradient,
    check_tiny_kkt,
    check_complementarity,
)


def run_all(checks=ALL_CHECKS):
    """Run every check; returns (all_passed, list of results)."""
    results = [check() for check in checks]
    return all(passed for _, passed, _ in results), results
