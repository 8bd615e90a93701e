"""Domain types and welfare accounting shared by every solver.

All containers are frozen dataclasses wrapping read-only numpy arrays, so they
can be shared freely between threads and used as inputs to pure functions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

# absolute tolerance for every welfare comparison in the package
WELFARE_TOL = 1e-9


class RecourseError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(RecourseError, ValueError):
    """An input violates a stated invariant."""


class SizeError(RecourseError):
    """An exhaustive routine was asked to enumerate too many candidates."""


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _default_ids(prefix: str, count: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i + 1}" for i in range(count))


def _check_ids(ids: Sequence[str], count: int, what: str) -> tuple[str, ...]:
    ids = tuple(str(x) for x in ids)
    if len(ids) != count:
        raise ValidationError(f"{what} ids: expected {count} labels, got {len(ids)}")
    if len(set(ids)) != len(ids):
        raise ValidationError(f"{what} ids contain duplicates")
    return ids


def _as_grid(values, what: str) -> np.ndarray:
    grid = np.array(values, dtype=np.float64)
    if grid.ndim != 2 or grid.shape[0] == 0 or grid.shape[1] == 0:
        raise ValidationError(f"{what} must be a non-empty 2-D grid, got shape {grid.shape}")
    if not np.all(np.isfinite(grid)):
        raise ValidationError(f"{what} contains non-finite entries")
    return grid


@dataclass(frozen=True)
class CostMatrix:
    """n x m nonnegative recourse costs between seekers (rows) and providers (columns)."""

    costs: np.ndarray
    seeker_ids: tuple[str, ...] = ()
    provider_ids: tuple[str, ...] = ()

    def __post_init__(self):
        grid = _as_grid(self.costs, "cost matrix")
        if np.any(grid < 0):
            i, j = np.argwhere(grid < 0)[0]
            raise ValidationError(f"cost matrix entry ({i}, {j}) is negative: {grid[i, j]}")
        n, m = grid.shape
        object.__setattr__(self, "costs", _frozen(grid))
        object.__setattr__(
            self, "seeker_ids", _check_ids(self.seeker_ids or _default_ids("s", n), n, "seeker")
        )
        object.__setattr__(
            self, "provider_ids", _check_ids(self.provider_ids or _default_ids("p", m), m, "provider")
        )

    @property
    def n_seekers(self) -> int:
        return self.costs.shape[0]

    @property
    def n_providers(self) -> int:
        return self.costs.shape[1]


@dataclass(frozen=True)
class WeightMatrix:
    """n x m edge weights in (0, 1].

    ``gamma`` is the scale used by the exponential transform when the matrix was
    derived from costs; it is ``None`` for weights supplied directly.
    """

    weights: np.ndarray
    seeker_ids: tuple[str, ...] = ()
    provider_ids: tuple[str, ...] = ()
    gamma: Optional[float] = None
    transform: str = "exp"

    def __post_init__(self):
        grid = _as_grid(self.weights, "weight matrix")
        bad = (grid <= 0) | (grid > 1)
        if np.any(bad):
            i, j = np.argwhere(bad)[0]
            raise ValidationError(f"weight ({i}, {j}) = {grid[i, j]} outside (0, 1]")
        if self.gamma is not None and not (np.isfinite(self.gamma) and self.gamma > 0):
            raise ValidationError(f"gamma must be positive and finite, got {self.gamma}")
        n, m = grid.shape
        object.__setattr__(self, "weights", _frozen(grid))
        object.__setattr__(
            self, "seeker_ids", _check_ids(self.seeker_ids or _default_ids("s", n), n, "seeker")
        )
        object.__setattr__(
            self, "provider_ids", _check_ids(self.provider_ids or _default_ids("p", m), m, "provider")
        )

    @property
    def n_seekers(self) -> int:
        return self.weights.shape[0]

    @property
    def n_providers(self) -> int:
        return self.weights.shape[1]

    def row_best(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-seeker best weight and its provider index (ties go to the lowest index)."""
        best = np.argmax(self.weights, axis=1)
        return self.weights[np.arange(self.n_seekers), best], best

    def permute_providers(self, order: Sequence[int]) -> "WeightMatrix":
        order = list(order)
        return WeightMatrix(
            self.weights[:, order],
            self.seeker_ids,
            tuple(self.provider_ids[j] for j in order),
            self.gamma,
            self.transform,
        )


@dataclass(frozen=True)
class CapacityVector:
    """Per-provider slot counts."""

    capacities: tuple[int, ...]

    def __post_init__(self):
        caps = []
        for k in self.capacities:
            if isinstance(k, (bool, np.bool_)) or int(k) != k:
                raise ValidationError(f"capacities must be integers, got {k!r}")
            caps.append(int(k))
        if any(k < 0 for k in caps):
            raise ValidationError(f"capacities must be nonnegative, got {tuple(caps)}")
        object.__setattr__(self, "capacities", tuple(caps))

    @classmethod
    def zeros(cls, m: int) -> "CapacityVector":
        return cls((0,) * m)

    def total(self) -> int:
        return sum(self.capacities)

    def __len__(self) -> int:
        return len(self.capacities)

    def __iter__(self):
        return iter(self.capacities)

    def __getitem__(self, j):
        return self.capacities[j]


@dataclass(frozen=True)
class Matching:
    """Per-seeker provider index, or ``None`` when the seeker is unmatched."""

    assignment: tuple[Optional[int], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "assignment", tuple(None if a is None else int(a) for a in self.assignment)
        )

    @classmethod
    def empty(cls, n: int) -> "Matching":
        return cls((None,) * n)

    def loads(self, m: int) -> tuple[int, ...]:
        counts = [0] * m
        for a in self.assignment:
            if a is not None:
                counts[a] += 1
        return tuple(counts)

    @property
    def matched_count(self) -> int:
        return sum(a is not None for a in self.assignment)

    def pairs(self):
        return [(i, j) for i, j in enumerate(self.assignment) if j is not None]

    def check_feasible(self, n: int, capacities: CapacityVector) -> None:
        """Raise ValidationError naming the violated constraint."""
        m = len(capacities)
        if len(self.assignment) != n:
            raise ValidationError(
                f"matching constraint: assignment covers {len(self.assignment)} seekers, expected {n}"
            )
        for i, j in self.pairs():
            if not 0 <= j < m:
                raise ValidationError(f"matching constraint: seeker {i} assigned to unknown provider {j}")
        for j, (load, k) in enumerate(zip(self.loads(m), capacities)):
            if load > k:
                raise ValidationError(f"capacity constraint: provider {j} serves {load} seekers, capacity {k}")


@dataclass(frozen=True)
class PenaltyConfig:
    """Per-provider deviation penalties and the reference (initial) capacities."""

    betas: tuple[float, ...]
    initial_capacities: CapacityVector

    def __post_init__(self):
        betas = tuple(float(b) for b in self.betas)
        if not isinstance(self.initial_capacities, CapacityVector):
            object.__setattr__(self, "initial_capacities", CapacityVector(tuple(self.initial_capacities)))
        if len(betas) != len(self.initial_capacities):
            raise ValidationError(
                f"betas has length {len(betas)} but there are {len(self.initial_capacities)} providers"
            )
        if any(not np.isfinite(b) or b < 0 for b in betas):
            raise ValidationError(f"betas must be finite and nonnegative, got {betas}")
        object.__setattr__(self, "betas", betas)

    @classmethod
    def uniform(cls, beta: float, initial: Sequence[int]) -> "PenaltyConfig":
        initial = CapacityVector(tuple(initial))
        return cls((beta,) * len(initial), initial)

    def deltas(self, capacities: CapacityVector) -> tuple[int, ...]:
        return tuple(k - k0 for k, k0 in zip(capacities, self.initial_capacities))

    def penalty(self, capacities: CapacityVector) -> float:
        return float(sum(b * abs(d) for b, d in zip(self.betas, self.deltas(capacities))))


@dataclass(frozen=True)
class WelfareReport:
    individual_welfare: float
    social_welfare: float
    welfare_gap: float
    penalty: float
    objective: float
    matched_count: int
    capacity_used: CapacityVector
    capacity_delta: tuple[int, ...]

    @property
    def pct_of_individual(self) -> float:
        if self.individual_welfare == 0:
            return 0.0
        return 100.0 * self.social_welfare / self.individual_welfare


def individual_welfare(W: WeightMatrix) -> float:
    """Sum of each seeker's best edge weight, ignoring capacities."""
    return float(W.weights.max(axis=1).sum())


def matching_welfare(W: WeightMatrix, M: Matching) -> float:
    return float(sum(W.weights[i, j] for i, j in M.pairs()))


def evaluate(
    W: WeightMatrix,
    M: Matching,
    K: CapacityVector,
    P: Optional[PenaltyConfig] = None,
) -> WelfareReport:
    """Score a feasible matching under capacities ``K``.

    With a penalty config the penalty is charged on the deviation of ``K`` from
    the config's initial capacities; without one the penalty and deltas are zero.
    """
    if len(K) != W.n_providers:
        raise ValidationError(f"capacity vector has {len(K)} entries, matrix has {W.n_providers} providers")
    M.check_feasible(W.n_seekers, K)
    if P is not None and len(P.betas) != W.n_providers:
        raise ValidationError(f"penalty config has {len(P.betas)} betas, matrix has {W.n_providers} providers")

    iw = individual_welfare(W)
    sw = matching_welfare(W, M)
    if P is None:
        penalty, delta = 0.0, (0,) * len(K)
    else:
        penalty, delta = P.penalty(K), P.deltas(K)
    return WelfareReport(
        individual_welfare=iw,
        social_welfare=sw,
        welfare_gap=iw - sw,
        penalty=penalty,
        objective=sw - penalty,
        matched_count=M.matched_count,
        capacity_used=K,
        capacity_delta=delta,
    )
