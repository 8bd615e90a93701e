"""Minimal-cost recourse actions against linear classifiers.

A seeker ``x`` rejected by ``h(x) = sign(w.x + b)`` needs an action ``a`` with
``w.(x + a) + b >= MARGIN``. Costs are the l1 or l-infinity norm of ``a``.
Other model families are out of scope here; their costs enter as matrices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import CostMatrix, RecourseError, ValidationError

MARGIN = 1e-6
NORMS = ("l1", "linf")


class Infeasible(RecourseError):
    """No action inside the allowed set flips the classifier."""


def normalize_norm(norm: str) -> str:
    key = str(norm).strip().lower().replace("_", "").replace("-", "")
    aliases = {"l1": "l1", "1": "l1", "linf": "linf", "inf": "linf", "lmax": "linf"}
    if key not in aliases:
        raise ValidationError(f"norm must be one of {NORMS}, got {norm!r}")
    return aliases[key]


@dataclass(frozen=True)
class LinearProvider:
    weights: np.ndarray
    bias: float
    id: str = "p"

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64).ravel()
        if w.size == 0 or not np.any(w != 0):
            raise ValidationError(f"provider {self.id}: weight vector must have a nonzero entry")
        if not np.all(np.isfinite(w)) or not np.isfinite(self.bias):
            raise ValidationError(f"provider {self.id}: non-finite parameters")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", float(self.bias))

    def score(self, x) -> float:
        return float(np.dot(self.weights, x) + self.bias)

    def accepts(self, x) -> bool:
        return self.score(x) >= 0


@dataclass(frozen=True)
class ActionConstraints:
    """Absolute feature bounds plus a mutability mask.

    Immutable features are pinned to the seeker's current value at solve time.
    """

    lower: np.ndarray
    upper: np.ndarray
    mutable: np.ndarray = field(default=None)

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=np.float64).ravel()
        hi = np.asarray(self.upper, dtype=np.float64).ravel()
        mut = np.ones(lo.size, dtype=bool) if self.mutable is None else np.asarray(self.mutable, dtype=bool).ravel()
        if not (lo.size == hi.size == mut.size):
            raise ValidationError("lower, upper and mutable must have the same length")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)) or np.any(lo > hi):
            raise ValidationError("feature bounds need lower <= upper elementwise")
        for a in (lo, hi, mut):
            a.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        object.__setattr__(self, "mutable", mut)

    @classmethod
    def unbounded(cls, d: int, mutable=None) -> "ActionConstraints":
        return cls(np.full(d, -np.inf), np.full(d, np.inf), mutable)


def _headroom(x: np.ndarray, w: np.ndarray, A: ActionConstraints) -> np.ndarray:
    """How far each coordinate may move in the direction that raises the score."""
    if A.lower.size != x.size:
        raise ValidationError(f"constraints cover {A.lower.size} features, seeker has {x.size}")
    outside = A.mutable & ((x < A.lower) | (x > A.upper))
    if np.any(outside):
        raise ValidationError(f"seeker lies outside the feature bounds at {np.flatnonzero(outside).tolist()}")
    with np.errstate(invalid="ignore"):
        room = np.where(w > 0, A.upper - x, np.where(w < 0, x - A.lower, 0.0))
    return np.where(A.mutable & (w != 0), room, 0.0)


def _linf_radius(required: float, gains: np.ndarray, room: np.ndarray) -> float:
    """Smallest t with sum(gains * min(t, room)) >= required, by bisection."""

    def reach(t: float) -> float:
        return float(np.sum(gains * np.minimum(t, room)))

    lo = 0.0
    if np.all(np.isfinite(room)):
        hi = float(room.max())
    else:
        hi = required / gains.sum()
        while reach(hi) < required:
            hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if reach(mid) >= required:
            hi = mid
        else:
            lo = mid
    return hi


def min_cost_action(
    x, h: LinearProvider, A: Optional[ActionConstraints] = None, norm: str = "linf"
) -> tuple[np.ndarray, float]:
    """Cheapest action flipping ``h`` on ``x``; raises Infeasible if none exists."""
    norm = normalize_norm(norm)
    x = np.asarray(x, dtype=np.float64).ravel()
    w = h.weights
    if x.size != w.size:
        raise ValidationError(f"seeker has {x.size} features, provider {h.id} expects {w.size}")
    if A is None:
        A = ActionConstraints.unbounded(x.size)
    score = h.score(x)
    if score >= 0:
        raise ValidationError(f"provider {h.id} already accepts the seeker (score {score:.6g})")

    required = MARGIN - score
    room = _headroom(x, w, A)
    gains = np.abs(w)
    best_possible = float(np.sum(gains * room)) if np.all(np.isfinite(room[gains > 0])) else np.inf
    if best_possible < required:
        raise Infeasible(
            f"provider {h.id}: best reachable score {score + best_possible:.6g} stays below the boundary"
        )
    direction = np.sign(w)

    if norm == "linf":
        t = _linf_radius(required, gains, room)
        step = np.minimum(t, room)
    else:
        step = np.zeros_like(x)
        left = required
        for k in sorted(np.flatnonzero(room > 0), key=lambda k: (-gains[k], k)):
            step[k] = min(room[k], left / gains[k])
            left -= gains[k] * step[k]
            if left <= 0:
                break
    action = direction * step
    cost = float(np.max(np.abs(action))) if norm == "linf" else float(np.sum(np.abs(action)))
    return action, cost


def build_cost_matrix(
    seekers: Sequence,
    providers: Sequence[LinearProvider],
    A: Optional[ActionConstraints] = None,
    norm: str = "linf",
    seeker_ids: Optional[Sequence[str]] = None,
) -> CostMatrix:
    """Recourse cost of every (seeker, provider) pair.

    Every seeker must start out rejected by every provider, and every pair must
    admit some action; violations are reported with the offending pairs.
    """
    X = np.atleast_2d(np.asarray(seekers, dtype=np.float64))
    if X.shape[0] == 0 or not providers:
        raise ValidationError("need at least one seeker and one provider")
    ids = list(seeker_ids) if seeker_ids is not None else [f"s{i + 1}" for i in range(X.shape[0])]
    if len(ids) != X.shape[0]:
        raise ValidationError(f"{len(ids)} seeker ids for {X.shape[0]} seekers")

    accepted = [(ids[i], h.id) for i in range(X.shape[0]) for h in providers if h.accepts(X[i])]
    if accepted:
        raise ValidationError(f"seekers must be rejected by every provider; accepted pairs: {accepted}")

    costs = np.zeros((X.shape[0], len(providers)))
    infeasible = []
    for i in range(X.shape[0]):
        for j, h in enumerate(providers):
            try:
                costs[i, j] = min_cost_action(X[i], h, A, norm)[1]
            except Infeasible:
                infeasible.append((ids[i], h.id))
    if infeasible:
        raise Infeasible(f"no recourse exists for pairs: {infeasible}")
    return CostMatrix(costs, tuple(ids), tuple(h.id for h in providers))
