"""Reference solvers that share no code with the package's own solvers."""
import itertools

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, linear_sum_assignment, milp


def lsa_welfare(weights, capacities):
    """Max-weight capacitated matching via assignment on slot-expanded columns."""
    weights = np.asarray(weights)
    n = weights.shape[0]
    cols = [j for j, k in enumerate(capacities) for _ in range(min(int(k), n))]
    if not cols:
        return 0.0
    expanded = weights[:, cols]
    rows, picked = linear_sum_assignment(expanded, maximize=True)
    return float(expanded[rows, picked].sum())


def compositions(m, total):
    """Stars and bars: every nonnegative m-vector summing to total."""
    for bars in itertools.combinations(range(total + m - 1), m - 1):
        edges = (-1,) + bars + (total + m - 1,)
        yield tuple(edges[k + 1] - edges[k] - 1 for k in range(m))


def penalized_by_enumeration(weights, betas, initial, total):
    best = -np.inf
    for caps in compositions(len(initial), total):
        obj = lsa_welfare(weights, caps) - sum(b * abs(k - k0) for b, k, k0 in zip(betas, caps, initial))
        best = max(best, obj)
    return best


def penalized_by_milp(weights, betas, initial, total):
    """Joint matching/capacity MILP with |delta| split into up and down parts."""
    weights = np.asarray(weights)
    n, m = weights.shape
    nz = n * m
    # variables: z (n*m), k (m), up (m), down (m)
    nv = nz + 3 * m
    c = np.zeros(nv)
    c[:nz] = -weights.ravel()
    c[nz + m: nz + 2 * m] = betas
    c[nz + 2 * m:] = betas
    rows, lo, hi = [], [], []
    for i in range(n):
        r = np.zeros(nv); r[i * m:(i + 1) * m] = 1
        rows.append(r); lo.append(-np.inf); hi.append(1)
    for j in range(m):
        r = np.zeros(nv); r[j:nz:m] = 1; r[nz + j] = -1
        rows.append(r); lo.append(-np.inf); hi.append(0)
        r = np.zeros(nv); r[nz + j] = 1; r[nz + m + j] = -1; r[nz + 2 * m + j] = 1
        rows.append(r); lo.append(initial[j]); hi.append(initial[j])
    r = np.zeros(nv); r[nz:nz + m] = 1
    rows.append(r); lo.append(total); hi.append(total)
    upper = np.concatenate([np.ones(nz), np.full(3 * m, np.inf)])
    res = milp(
        c,
        constraints=LinearConstraint(np.array(rows), lo, hi),
        integrality=np.ones(nv),
        bounds=Bounds(np.zeros(nv), upper),
        options={"mip_rel_gap": 0},
    )
    assert res.success, res.message
    return -res.fun


def _axis(lo, hi, step):
    # grid through 0 at the given step, clipped to [lo, hi], endpoints included
    pts = np.arange(np.ceil(lo / step), np.floor(hi / step) + 1) * step
    return np.unique(np.concatenate([pts, [lo, hi]]))


def grid_min_cost(x, w, b, lower, upper, mutable, norm, margin=1e-6, step=1e-3):
    """Cheapest grid action (d = 2) reaching w.(x + a) + b >= margin, or None."""
    axes = []
    for k in range(2):
        if mutable[k]:
            axes.append(_axis(lower[k] - x[k], upper[k] - x[k], step))
        else:
            axes.append(np.array([0.0]))
    a0, a1 = np.meshgrid(axes[0], axes[1], indexing="ij")
    ok = w[0] * (x[0] + a0) + w[1] * (x[1] + a1) + b >= margin
    if not ok.any():
        return None
    cost = np.maximum(np.abs(a0), np.abs(a1)) if norm == "linf" else np.abs(a0) + np.abs(a1)
    return float(cost[ok].min())
