"""Capacity redistribution with a penalty on deviating from the initial capacities.

The default solver is exact: it walks every composition of the budget across
providers and solves the inner matching for each. Local search over unit
transfers is offered for instances where the composition count is too large.
"""
from __future__ import annotations

import logging
from math import comb
from typing import Iterator, Optional

from .core import (
    WELFARE_TOL,
    CapacityVector,
    Matching,
    PenaltyConfig,
    SizeError,
    ValidationError,
    WeightMatrix,
    WelfareReport,
    evaluate,
)
from .matching import solve_matching

log = logging.getLogger(__name__)

MAX_COMPOSITIONS = 10 ** 6


def composition_count(m: int, total: int) -> int:
    return comb(total + m - 1, m - 1)


def enumerate_capacities(m: int, total: int) -> Iterator[CapacityVector]:
    """Every nonnegative integer m-vector summing to ``total``, in lexicographic order."""
    if m < 1 or total < 0:
        raise ValidationError(f"need m >= 1 and total >= 0, got m={m}, total={total}")
    count = composition_count(m, total)
    if count > MAX_COMPOSITIONS:
        raise SizeError(
            f"{count} capacity vectors for m={m}, K={total} exceeds {MAX_COMPOSITIONS}; "
            "use local_search_penalized instead"
        )

    def rec(prefix: tuple[int, ...], left: int, slots: int):
        if slots == 1:
            yield prefix + (left,)
            return
        for k in range(left + 1):
            yield from rec(prefix + (k,), left - k, slots - 1)

    return (CapacityVector(c) for c in rec((), total, m))


class _Scorer:
    """Objective evaluation with the inner matching memoized by effective capacity."""

    def __init__(self, W: WeightMatrix, P: PenaltyConfig):
        if len(P.betas) != W.n_providers:
            raise ValidationError(
                f"penalty config has {len(P.betas)} providers, weight matrix has {W.n_providers}"
            )
        self.W, self.P = W, P
        self._cache: dict[tuple[int, ...], tuple[Matching, float]] = {}

    def matching(self, caps: CapacityVector) -> tuple[Matching, float]:
        # slots beyond n are never used, so capping gives the same optimum
        key = tuple(min(k, self.W.n_seekers) for k in caps)
        if key not in self._cache:
            M, report = solve_matching(self.W, caps)
            self._cache[key] = (M, report.social_welfare)
        return self._cache[key]

    def objective(self, caps: CapacityVector) -> float:
        return self.matching(caps)[1] - self.P.penalty(caps)

    def deviation(self, caps: CapacityVector) -> int:
        return sum(abs(d) for d in self.P.deltas(caps))

    def report(self, caps: CapacityVector) -> tuple[CapacityVector, Matching, WelfareReport]:
        M, _ = self.matching(caps)
        return caps, M, evaluate(self.W, M, caps, self.P)


def select_best(scored: list[tuple[float, int, CapacityVector]]) -> CapacityVector:
    """Pick the max-objective vector; near-ties go to the smaller total deviation, then lexicographic order.

    Input order does not affect the result.
    """
    top = max(obj for obj, _, _ in scored)
    tied = [(dev, caps.capacities) for obj, dev, caps in scored if obj >= top - WELFARE_TOL]
    return CapacityVector(min(tied)[1])


def solve_penalized(
    W: WeightMatrix, P: PenaltyConfig, total: Optional[int] = None
) -> tuple[CapacityVector, Matching, WelfareReport]:
    """Jointly choose capacities summing to ``total`` and a matching, maximizing
    welfare minus the deviation penalty. ``total`` defaults to the initial capacities' sum.
    """
    total = P.initial_capacities.total() if total is None else total
    if int(total) != total or total < 0:
        raise ValidationError(f"total capacity must be a nonnegative integer, got {total!r}")
    scorer = _Scorer(W, P)
    scored = [
        (scorer.objective(caps), scorer.deviation(caps), caps)
        for caps in enumerate_capacities(W.n_providers, int(total))
    ]
    return scorer.report(select_best(scored))


def local_search_penalized(
    W: WeightMatrix,
    P: PenaltyConfig,
    total: int,
    start: CapacityVector,
    max_steps: int = 10_000,
) -> tuple[CapacityVector, Matching, WelfareReport]:
    """Steepest-ascent hill climbing over single-unit capacity transfers."""
    if not isinstance(start, CapacityVector):
        start = CapacityVector(tuple(start))
    if len(start) != W.n_providers:
        raise ValidationError(f"start has {len(start)} entries, weight matrix has {W.n_providers} providers")
    if start.total() != total:
        raise ValidationError(f"start capacities sum to {start.total()}, budget is {total}")
    scorer = _Scorer(W, P)
    m = W.n_providers
    current = start
    current_obj = scorer.objective(current)

    for _ in range(max_steps):
        best = None
        for a in range(m):
            if current[a] == 0:
                continue
            for b in range(m):
                if a == b:
                    continue
                caps = list(current)
                caps[a] -= 1
                caps[b] += 1
                cand = CapacityVector(tuple(caps))
                obj = scorer.objective(cand)
                if obj <= current_obj + WELFARE_TOL:
                    continue
                key = (scorer.deviation(cand), a, b)
                if (
                    best is None
                    or obj > best[0] + WELFARE_TOL
                    or (obj >= best[0] - WELFARE_TOL and key < best[1])
                ):
                    best = (obj, key, cand)
        if best is None:
            break
        current_obj, _, current = best
    else:
        log.warning("local search stopped after %d steps without converging", max_steps)
    return scorer.report(current)
