"""Bounded-switching feasibility and cutting planes for a single switch.

A binary pattern w in {0,1}^M is feasible when the number of on/off
transitions of (0, w_1, ..., w_M) stays within the switching budget; the
leading zero encodes that the switch is off before the horizon, so a
pattern starting at 1 spends one transition immediately.

Infeasible fractional points are cut off by alternating inequalities

    w_{i_1} - w_{i_2} + w_{i_3} - ... <= floor(sigma_max / 2)

over strictly increasing indices with m > sigma_max picks and
m - sigma_max odd.  The leading pick may sit at the first index (a
pattern that starts on already pays a transition there); later picks
necessarily sit at index 2 or beyond.  `separate` maximizes the violation
over the whole family by dynamic programming in O(M * sigma_max);
`separate_bruteforce` enumerates the family and is kept as an
independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .timegrid import Projection

_CLIP_TOL = 1e-9


@dataclass(frozen=True)
class SwitchingBudget:
    """Per-switch bound on the transition count, off before the horizon."""

    sigma_max: int

    def __post_init__(self):
        if self.sigma_max < 0:
            raise ValueError("switching budget must be nonnegative")

    @property
    def cut_rhs(self) -> float:
        return float(self.sigma_max // 2)


@dataclass(frozen=True)
class CuttingPlane:
    """Valid inequality dot(a, w) <= b for the projected feasible hull.

    For alternating cuts the nonzero coefficients are +-1 with
    alternating sign at increasing indices."""

    projection: Projection
    a: np.ndarray
    b: float

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.size != self.projection.dim:
            raise ValueError("coefficient length must match projection dimension")
        if np.any(np.abs(a) > 1.0 + 1e-12):
            raise ValueError("cut coefficients must lie in [-1, 1]")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    def violation(self, w: np.ndarray) -> float:
        return float(self.a @ w - self.b)


def shift_count(w) -> int:
    """Transitions of (0, w_1, ..., w_M) for a binary pattern."""
    w = np.asarray(w)
    if w.size and not np.isin(w, (0, 1)).all():
        raise ValueError("pattern entries must be 0 or 1")
    padded = np.concatenate([[0], w.astype(np.int8)])
    return int(np.count_nonzero(np.diff(padded)))


def enumerate_vertices(m: int, budget: SwitchingBudget) -> np.ndarray:
    """All binary patterns of length m within the budget, one per row.

    Bit i of the enumeration index is entry i of the pattern; guarded to
    m <= 20 to avoid blowup."""
    if m > 20:
        raise ValueError("vertex enumeration is limited to m <= 20")
    codes = np.arange(2**m, dtype=np.int64)
    table = ((codes[:, None] >> np.arange(m)) & 1).astype(np.int8)
    padded = np.concatenate([np.zeros((codes.size, 1), np.int8), table], axis=1)
    shifts = np.count_nonzero(np.diff(padded, axis=1), axis=1)
    return table[shifts <= budget.sigma_max]


def _check_box(w: np.ndarray) -> np.ndarray:
    if np.any(w < -_CLIP_TOL) or np.any(w > 1.0 + _CLIP_TOL):
        raise ValueError("separation input leaves [0, 1] by more than 1e-9")
    return np.clip(w, 0.0, 1.0)


def _sign_and_next(c: int, sigma_max: int):
    # class c <= sigma_max is an exact pick count; class sigma_max+1
    # collects counts >= sigma_max+1 of admissible parity, class
    # sigma_max+2 their off-parity successors
    if c <= sigma_max:
        parity = c % 2
        nxt = c + 1
    elif c == sigma_max + 1:
        parity = (sigma_max + 1) % 2
        nxt = sigma_max + 2
    else:
        parity = sigma_max % 2
        nxt = sigma_max + 1
    return (1.0 if parity == 0 else -1.0), nxt


def _alternating_best(w: np.ndarray, sigma_max: int):
    """Max alternating pick sum over the admissible index family together
    with the realizing signed index set; (-inf, None) when the family is
    empty.  One pass over the entries with O(sigma_max) states."""
    m = w.size
    n_class = sigma_max + 3
    neg = -np.inf
    best = [neg] * n_class
    best[0] = 0.0
    # parent[pos][c] = class before position pos when the pick at pos led
    # to class c; -1 marks "carried over, nothing picked here"
    parent = np.full((m, n_class), -1, dtype=np.int8)
    for pos in range(m):
        wv = w[pos]
        prev = list(best)
        for c in range(n_class):
            base = prev[c]
            if base == neg:
                continue
            sign, nxt = _sign_and_next(c, sigma_max)
            cand = base + sign * wv
            if cand > best[nxt]:
                best[nxt] = cand
                parent[pos, nxt] = c
    target = sigma_max + 1
    if best[target] == neg:
        return neg, None
    # every write strictly improves a class value, so the final optimum of
    # a class sits at its last recorded write; walk those writes backwards
    picked = []
    c = target
    for pos in range(m - 1, -1, -1):
        src = parent[pos, c]
        if src >= 0:
            sign, _ = _sign_and_next(int(src), sigma_max)
            picked.append((pos, sign))
            c = int(src)
    picked.reverse()
    return float(best[target]), picked


def _cut_vector(m: int, picked) -> np.ndarray:
    a = np.zeros(m)
    for pos, sign in picked:
        a[pos] = sign
    return a


def separate(w, budget: SwitchingBudget):
    """Most violated alternating cut for one switch, or None.

    Returns (coefficients, rhs, violation) with violation > 0, where the
    coefficient vector has the length of w."""
    w = _check_box(np.asarray(w, dtype=float))
    value, picked = _alternating_best(w, budget.sigma_max)
    if picked is None:
        return None
    violation = value - budget.cut_rhs
    if violation <= 0.0:
        return None
    return _cut_vector(w.size, picked), budget.cut_rhs, violation


@lru_cache(maxsize=32)
def _family_matrix(m: int, sigma_max: int) -> np.ndarray:
    """Signed incidence rows of every admissible alternating index set."""
    rows = []
    for mask in range(1, 1 << m):
        count = mask.bit_count()
        if count <= sigma_max or (count - sigma_max) % 2 == 0:
            continue
        row = np.zeros(m)
        sign = 1.0
        probe = mask
        while probe:
            low = probe & -probe
            row[low.bit_length() - 1] = sign
            sign = -sign
            probe ^= low
        rows.append(row)
    if not rows:
        return np.zeros((0, m))
    return np.array(rows)


def separate_bruteforce(w, budget: SwitchingBudget):
    """Exhaustive maximization over the alternating family; same return
    contract as `separate`, kept independent as its oracle."""
    w = _check_box(np.asarray(w, dtype=float))
    if w.size > 18:
        raise ValueError("brute-force separation is limited to 18 entries")
    fam = _family_matrix(w.size, budget.sigma_max)
    if fam.shape[0] == 0:
        return None
    values = fam @ w
    top = int(np.argmax(values))
    violation = float(values[top]) - budget.cut_rhs
    if violation <= 0.0:
        return None
    return fam[top].copy(), budget.cut_rhs, violation


def separate_control(values: np.ndarray, budget: SwitchingBudget, projection: Projection):
    """Separate a projected multi-switch point switch by switch.

    values holds the projected coefficients stacked switch-major (the
    output layout of `timegrid.project`). Returns (CuttingPlane,
    violation, per-switch violations) for the most violated switch, or
    (None, 0.0, zeros) when every switch is within budget."""
    n = projection.n_switches
    block = projection.partition.num_intervals
    per_switch = np.zeros(n)
    best = None
    for j in range(n):
        res = separate(values[j * block : (j + 1) * block], budget)
        if res is None:
            continue
        coeffs, rhs, violation = res
        per_switch[j] = violation
        if best is None or violation > best[1]:
            full = np.zeros(projection.dim)
            full[j * block : (j + 1) * block] = coeffs
            best = (CuttingPlane(projection, full, rhs), violation)
    if best is None:
        return None, 0.0, per_switch
    return best[0], best[1], per_switch
