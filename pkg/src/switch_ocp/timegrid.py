"""Interval partitions of (0, T), dyadic refinement, and local averaging.

A switching control is piecewise constant on a partition of the time
horizon.  Coarser partitions induce local-averaging projections of a
control onto a small coefficient vector; cutting planes act on those
projected coefficients.  Refinement is always bisection, so a chain of
refinements stays nested and the max/min interval-length ratio is
preserved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _readonly(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TimePartition:
    """Breakpoints 0 = t_0 < t_1 < ... < t_N = T; intervals I_i = (t_{i-1}, t_i).

    Stored by breakpoints (not lengths) so that nesting checks are exact:
    `refine` copies parent breakpoints verbatim and `uniform` places
    breakpoints at horizon * k / N, which makes boundaries of a coarse
    uniform grid bit-identical to the matching boundaries of any uniform
    grid whose interval count it divides.
    """

    boundaries: np.ndarray
    level: int = 0

    def __post_init__(self):
        b = _readonly(self.boundaries)
        if b.ndim != 1 or b.size < 2:
            raise ValueError("need at least two breakpoints")
        if b[0] != 0.0:
            raise ValueError("partition must start at t = 0")
        if not np.all(np.diff(b) > 0.0):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "boundaries", b)

    @classmethod
    def uniform(cls, horizon: float, num_intervals: int, level: int = 0) -> "TimePartition":
        if horizon <= 0 or num_intervals < 1:
            raise ValueError("horizon and interval count must be positive")
        b = horizon * np.arange(num_intervals + 1) / num_intervals
        return cls(b, level)

    @property
    def horizon(self) -> float:
        return float(self.boundaries[-1])

    @property
    def num_intervals(self) -> int:
        return self.boundaries.size - 1

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.boundaries)

    @property
    def max_length(self) -> float:
        return float(self.lengths.max())

    @property
    def min_length(self) -> float:
        return float(self.lengths.min())

    @property
    def quasi_uniformity(self) -> float:
        """Ratio max interval length / min interval length (1 for uniform)."""
        return self.max_length / self.min_length

    def midpoints(self) -> np.ndarray:
        b = self.boundaries
        return b[:-1] + 0.5 * np.diff(b)

    def same_as(self, other: "TimePartition") -> bool:
        return self.boundaries.size == other.boundaries.size and bool(
            np.all(self.boundaries == other.boundaries)
        )

    def is_refinement_of(self, coarse: "TimePartition") -> bool:
        """True when every breakpoint of `coarse` occurs in this partition."""
        if coarse.horizon != self.horizon:
            return False
        return bool(np.isin(coarse.boundaries, self.boundaries).all())


def refine_dyadic(p: TimePartition) -> TimePartition:
    """Bisect every interval; parent breakpoints are kept bit-identical."""
    b = p.boundaries
    out = np.empty(2 * p.num_intervals + 1)
    out[::2] = b
    out[1::2] = b[:-1] + 0.5 * np.diff(b)
    return TimePartition(out, p.level + 1)


def interval_map(fine: TimePartition, coarse: TimePartition) -> np.ndarray:
    """Index of the coarse interval containing each fine interval."""
    if not fine.is_refinement_of(coarse):
        raise ValueError("partitions are not nested")
    idx = np.searchsorted(coarse.boundaries, fine.midpoints()) - 1
    return idx


@dataclass(frozen=True)
class Projection:
    """Local averaging onto a partition, switch by switch.

    Sends a control u to the vector of its mean values over the partition
    intervals; entry (j-1)*N + i is the average of switch j over I_i.
    """

    partition: TimePartition
    n_switches: int = 1

    def __post_init__(self):
        if self.n_switches < 1:
            raise ValueError("need at least one switch")

    @property
    def dim(self) -> int:
        return self.n_switches * self.partition.num_intervals


@dataclass(frozen=True)
class Control:
    """Piecewise-constant control: coefficient (j, i) is the value of
    switch j on interval I_i of its partition."""

    coefficients: np.ndarray
    partition: TimePartition

    def __post_init__(self):
        c = _readonly(np.atleast_2d(self.coefficients))
        if c.shape[1] != self.partition.num_intervals:
            raise ValueError("coefficient columns must match interval count")
        object.__setattr__(self, "coefficients", c)

    @property
    def n_switches(self) -> int:
        return self.coefficients.shape[0]


def project(pi: Projection, u: Control) -> np.ndarray:
    """Averages of u over the projection's intervals, stacked switch-major.

    u must live on the projection's partition or on a refinement of it.
    """
    if u.n_switches != pi.n_switches:
        raise ValueError("switch count mismatch")
    if u.partition.same_as(pi.partition):
        return u.coefficients.reshape(-1).copy()
    idx = interval_map(u.partition, pi.partition)
    fine_len = u.partition.lengths
    n_coarse = pi.partition.num_intervals
    out = np.zeros((pi.n_switches, n_coarse))
    weighted = u.coefficients * fine_len
    for j in range(pi.n_switches):
        np.add.at(out[j], idx, weighted[j])
    out /= pi.partition.lengths
    return out.reshape(-1)


def adjoint_embed(pi: Projection, a: np.ndarray) -> Control:
    """Riesz representative of a projected functional a.

    Returns the piecewise-constant function with value a_i / |I_i| on
    interval I_i (per switch), so that its L2 pairing with any control u
    on an aligned grid equals dot(a, project(pi, u)).
    """
    a = np.asarray(a, dtype=float)
    if a.size != pi.dim:
        raise ValueError("coefficient vector has wrong length")
    coeffs = a.reshape(pi.n_switches, -1) / pi.partition.lengths
    return Control(coeffs, pi.partition)


def expand_to(u: Control, fine: TimePartition) -> Control:
    """Re-express a piecewise-constant function on a refinement of its grid."""
    if u.partition.same_as(fine):
        return u
    idx = interval_map(fine, u.partition)
    return Control(u.coefficients[:, idx], fine)


def control_inner(u: Control, v: Control) -> float:
    """L2(0,T; R^n) inner product of two controls on the same partition."""
    if not u.partition.same_as(v.partition):
        raise ValueError("controls live on different partitions")
    return float(np.sum(u.partition.lengths * u.coefficients * v.coefficients))
