import numpy as np
import pytest

from switch_ocp import switchpoly
from switch_ocp.switchpoly import SwitchingBudget, enumerate_vertices, shift_count
from switch_ocp.timegrid import Projection, TimePartition


def all_binary(m):
    codes = np.arange(2**m)
    return ((codes[:, None] >> np.arange(m)) & 1).astype(float)


def test_shift_count_basics():
    assert shift_count([0, 0, 0]) == 0
    assert shift_count([1, 1, 1]) == 1  # switching on at the start costs one
    assert shift_count([0, 1, 0, 1]) == 3
    assert shift_count([1, 0, 1, 0]) == 4
    assert shift_count([]) == 0


def test_shift_count_rejects_non_binary():
    with pytest.raises(ValueError):
        shift_count([0.0, 0.5, 1.0])


def test_enumerate_small_budgets():
    got = {tuple(v) for v in enumerate_vertices(3, SwitchingBudget(1))}
    assert got == {(0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1)}
    assert enumerate_vertices(2, SwitchingBudget(2)).shape[0] == 4
    only = enumerate_vertices(1, SwitchingBudget(0))
    assert only.shape == (1, 1) and only[0, 0] == 0


def test_enumerate_guard():
    with pytest.raises(ValueError):
        enumerate_vertices(21, SwitchingBudget(1))


def test_separate_single_spike():
    res = switchpoly.separate(np.array([0.0, 1.0, 0.0]), SwitchingBudget(1))
    assert res is not None
    coeffs, rhs, violation = res
    assert np.array_equal(coeffs, [0.0, 1.0, -1.0])
    assert rhs == 0.0
    assert violation == 1.0


def test_separate_alternating_pattern():
    # the full-length alternating cut is the family maximum here
    res = switchpoly.separate(np.array([1.0, 0.0, 1.0, 0.0, 1.0]), SwitchingBudget(2))
    assert res is not None
    coeffs, rhs, violation = res
    assert rhs == 1.0
    assert violation == 2.0
    assert np.array_equal(coeffs, [1.0, -1.0, 1.0, -1.0, 1.0])
    confirm = switchpoly.separate_bruteforce(
        np.array([1.0, 0.0, 1.0, 0.0, 1.0]), SwitchingBudget(2)
    )
    assert confirm is not None and confirm[2] == violation


def test_no_cut_for_all_ones_budget_one():
    assert switchpoly.separate(np.ones(3), SwitchingBudget(1)) is None
    assert switchpoly.separate_bruteforce(np.ones(3), SwitchingBudget(1)) is None


def test_no_cut_for_zero_point():
    assert switchpoly.separate_bruteforce(np.zeros(6), SwitchingBudget(2)) is None


def test_feasible_vertices_never_cut():
    for sigma in (1, 2, 3):
        budget = SwitchingBudget(sigma)
        for m in (3, 5, 8):
            for v in enumerate_vertices(m, budget):
                assert switchpoly.separate(v.astype(float), budget) is None


def test_binary_exactness_and_oracle_equivalence():
    for sigma in (1, 2, 3):
        budget = SwitchingBudget(sigma)
        for m in range(1, 10):
            vertices = enumerate_vertices(m, budget)
            feasible = {tuple(v) for v in vertices}
            for w in all_binary(m):
                fast = switchpoly.separate(w, budget)
                brute = switchpoly.separate_bruteforce(w, budget)
                assert (fast is None) == (brute is None)
                if fast is None:
                    assert tuple(w.astype(int)) in feasible
                else:
                    assert tuple(w.astype(int)) not in feasible
                    assert fast[2] == brute[2]
                    # validity on every feasible pattern
                    assert np.max(vertices @ fast[0]) <= fast[1]


def test_random_fractional_oracle_equivalence():
    rng = np.random.default_rng(7)
    for _ in range(400):
        m = int(rng.integers(1, 13))
        sigma = int(rng.integers(1, 4))
        w = rng.uniform(0, 1, m)
        fast = switchpoly.separate(w, SwitchingBudget(sigma))
        brute = switchpoly.separate_bruteforce(w, SwitchingBudget(sigma))
        assert (fast is None) == (brute is None)
        if fast is not None:
            assert abs(fast[2] - brute[2]) <= 1e-12


def test_cut_coefficients_stay_in_unit_range():
    rng = np.random.default_rng(8)
    for _ in range(100):
        w = rng.uniform(0, 1, 12)
        res = switchpoly.separate(w, SwitchingBudget(2))
        if res is not None:
            assert np.abs(res[0]).max() <= 1.0


def test_box_excursions():
    budget = SwitchingBudget(1)
    # tiny numerical excursions are clipped silently
    assert switchpoly.separate(np.array([0.0, 1.0 + 1e-12, 0.0]), budget) is not None
    with pytest.raises(ValueError):
        switchpoly.separate(np.array([0.0, 1.1, 0.0]), budget)


def test_bruteforce_guard():
    with pytest.raises(ValueError):
        switchpoly.separate_bruteforce(np.zeros(19), SwitchingBudget(1))


def test_separate_control_picks_worst_switch():
    part = TimePartition.uniform(1.0, 3)
    pi = Projection(part, n_switches=2)
    values = np.array([0.0, 0.6, 0.0, 1.0, 0.0, 1.0])  # switch 1 mild, switch 2 worse
    cut, violation, per_switch = switchpoly.separate_control(
        values, SwitchingBudget(1), pi
    )
    assert cut is not None
    assert violation == per_switch.max()
    assert per_switch.shape == (2,)
    assert per_switch[1] > per_switch[0] > 0
    block = np.flatnonzero(cut.a)
    assert block.min() >= 3  # most violated switch is the second block


def test_separate_control_feasible_point():
    pi = Projection(TimePartition.uniform(1.0, 4), 1)
    cut, violation, per_switch = switchpoly.separate_control(
        np.full(4, 0.5), SwitchingBudget(2), pi
    )
    assert cut is None
    assert violation == 0.0
    assert not per_switch.any()
