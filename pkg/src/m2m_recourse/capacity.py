"""Optimal distribution of a total capacity budget, and the welfare curve over budgets."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CapacityVector, ValidationError, WeightMatrix
from .matching import solve_matching


@dataclass(frozen=True)
class CurvePoint:
    total_capacity: int
    capacity: CapacityVector
    welfare: float
    individual_welfare: float

    @property
    def gap(self) -> float:
        return self.individual_welfare - self.welfare


def ranked_best_edges(W: WeightMatrix) -> list[tuple[int, int, float]]:
    """(seeker, best provider, best weight) triples, strongest first.

    Equal weights keep seeker order; row ties resolve to the lowest provider index.
    """
    best_w, best_j = W.row_best()
    triples = [(i, int(best_j[i]), float(best_w[i])) for i in range(W.n_seekers)]
    return sorted(triples, key=lambda t: (-t[2], t[0]))


def optimal_capacity(W: WeightMatrix, total: int) -> CapacityVector:
    """Give one slot to the preferred provider of each of the top-``total`` seekers.

    Budget beyond the number of seekers cannot raise welfare; it is parked on
    provider 0 so the returned vector still sums to ``total``.
    """
    if int(total) != total or total < 0:
        raise ValidationError(f"total capacity must be a nonnegative integer, got {total!r}")
    total = int(total)
    counts = [0] * W.n_providers
    for _, j, _ in ranked_best_edges(W)[:total]:
        counts[j] += 1
    counts[0] += max(0, total - W.n_seekers)
    return CapacityVector(tuple(counts))


def top_k_welfare(W: WeightMatrix, total: int) -> float:
    """Upper bound on welfare with ``total`` slots: sum of the largest row maxima."""
    best = np.sort(W.weights.max(axis=1))[::-1]
    return float(best[: max(0, int(total))].sum())


def welfare_curve(W: WeightMatrix, max_total: int) -> list[CurvePoint]:
    if max_total < 0:
        raise ValidationError(f"max_total must be nonnegative, got {max_total}")
    iw = float(W.weights.max(axis=1).sum())
    points = []
    for K in range(int(max_total) + 1):
        caps = optimal_capacity(W, K)
        _, report = solve_matching(W, caps)
        points.append(CurvePoint(K, caps, report.social_welfare, iw))
    return points
