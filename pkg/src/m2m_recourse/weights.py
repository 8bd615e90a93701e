"""Exponential cost-to-weight transform."""
from __future__ import annotations

import logging
import math
import sys

import numpy as np

from .core import CostMatrix, ValidationError, WeightMatrix

log = logging.getLogger(__name__)

_TINY = sys.float_info.min


def to_weights(C: CostMatrix, gamma: float) -> WeightMatrix:
    """Map costs to weights with ``w = exp(-gamma * c)``.

    Weights that underflow to zero are clamped to the smallest positive normal
    double so that every edge still counts as strictly positive.
    """
    try:
        gamma = float(gamma)
    except (TypeError, ValueError):
        raise ValidationError(f"gamma must be a real number, got {gamma!r}") from None
    if not math.isfinite(gamma) or gamma <= 0:
        raise ValidationError(f"gamma must be positive and finite, got {gamma}")

    w = np.exp(-gamma * C.costs)
    clamped = w < _TINY
    if np.any(clamped):
        log.warning(
            "%d weight(s) underflowed at gamma=%g and were clamped to %g",
            int(clamped.sum()), gamma, _TINY,
        )
        w = np.where(clamped, _TINY, w)
    return WeightMatrix(w, C.seeker_ids, C.provider_ids, gamma=gamma)


def to_costs(W: WeightMatrix, gamma: float | None = None) -> CostMatrix:
    """Inverse transform, ``c = -ln(w) / gamma``."""
    gamma = W.gamma if gamma is None else gamma
    if gamma is None or gamma <= 0:
        raise ValidationError("inverting weights needs a positive gamma")
    return CostMatrix(-np.log(W.weights) / gamma, W.seeker_ids, W.provider_ids)
