"""Exact capacitated maximum-weight bipartite matching.

The matching LP is totally unimodular, so instead of a MILP we solve the
equivalent min-cost flow

    source -> seeker i      capacity 1,   cost 0
    seeker i -> provider j  capacity 1,   cost -w_ij
    provider j -> sink      capacity k_j, cost 0

with successive shortest paths. Every weight is positive and the graph is
complete, so a maximum-weight matching also has maximum cardinality
min(n, sum k) and the min-cost *maximum* flow is the welfare optimum.
"""
from __future__ import annotations

import heapq
from typing import Optional

import numpy as np

from .core import (
    CapacityVector,
    Matching,
    SizeError,
    ValidationError,
    WeightMatrix,
    WelfareReport,
    evaluate,
)

# weights are turned into integer arc costs at this resolution; 2**52 keeps the
# rounding error of a whole matching far below the 1e-9 welfare tolerance
COST_SCALE = 2 ** 52

BRUTE_FORCE_MAX_SEEKERS = 8
BRUTE_FORCE_MAX_PROVIDERS = 5


class FlowNetwork:
    """Residual graph with integer capacities and costs."""

    def __init__(self, n_nodes: int):
        self.n_nodes = n_nodes
        # parallel arc arrays; arc e and e ^ 1 are a forward/backward pair
        self.head: list[int] = []
        self.cap: list[int] = []
        self.cost: list[int] = []
        self.out: list[list[int]] = [[] for _ in range(n_nodes)]

    def add_arc(self, u: int, v: int, capacity: int, cost: int) -> int:
        if capacity < 0:
            raise ValidationError(f"arc {u}->{v} has negative capacity {capacity}")
        e = len(self.head)
        self.head += [v, u]
        self.cap += [capacity, 0]
        self.cost += [cost, -cost]
        self.out[u].append(e)
        self.out[v].append(e + 1)
        return e

    def flow_on(self, e: int) -> int:
        return self.cap[e ^ 1]

    def _initial_potentials(self, source: int) -> list[Optional[int]]:
        # Bellman-Ford over arcs with residual capacity; handles negative costs
        dist: list[Optional[int]] = [None] * self.n_nodes
        dist[source] = 0
        for _ in range(self.n_nodes - 1):
            changed = False
            for u in range(self.n_nodes):
                du = dist[u]
                if du is None:
                    continue
                for e in self.out[u]:
                    if self.cap[e] > 0:
                        v = self.head[e]
                        nd = du + self.cost[e]
                        if dist[v] is None or nd < dist[v]:
                            dist[v] = nd
                            changed = True
            if not changed:
                break
        return dist

    def min_cost_max_flow(self, source: int, sink: int) -> tuple[int, int]:
        """Augment along reduced-cost shortest paths until the sink is cut off.

        Returns (flow value, total cost).
        """
        potential = self._initial_potentials(source)
        if potential[sink] is None:
            return 0, 0
        pot = [p if p is not None else 0 for p in potential]
        flow = total_cost = 0
        n = self.n_nodes
        while True:
            dist: list[Optional[int]] = [None] * n
            prev_arc = [-1] * n
            dist[source] = 0
            heap = [(0, source)]
            while heap:
                d, u = heapq.heappop(heap)
                if d != dist[u]:
                    continue
                for e in self.out[u]:
                    if self.cap[e] <= 0:
                        continue
                    v = self.head[e]
                    nd = d + self.cost[e] + pot[u] - pot[v]
                    if dist[v] is None or nd < dist[v]:
                        dist[v] = nd
                        prev_arc[v] = e
                        heapq.heappush(heap, (nd, v))
            if dist[sink] is None:
                break
            for v in range(n):
                if dist[v] is not None:
                    pot[v] += dist[v]

            push = None
            v = sink
            while v != source:
                e = prev_arc[v]
                push = self.cap[e] if push is None else min(push, self.cap[e])
                v = self.head[e ^ 1]
            v = sink
            while v != source:
                e = prev_arc[v]
                self.cap[e] -= push
                self.cap[e ^ 1] += push
                total_cost += push * self.cost[e]
                v = self.head[e ^ 1]
            flow += push
        return flow, total_cost


def _check_dims(W: WeightMatrix, K: CapacityVector) -> CapacityVector:
    if not isinstance(K, CapacityVector):
        K = CapacityVector(tuple(K))
    if len(K) != W.n_providers:
        raise ValidationError(
            f"capacity vector has {len(K)} entries, weight matrix has {W.n_providers} providers"
        )
    return K


def build_network(W: WeightMatrix, K: CapacityVector) -> tuple[FlowNetwork, dict]:
    n, m = W.weights.shape
    source, sink = 0, n + m + 1
    net = FlowNetwork(n + m + 2)
    for i in range(n):
        net.add_arc(source, 1 + i, 1, 0)
    edge_arcs = {}
    for i in range(n):
        for j in range(m):
            if K[j] == 0:
                continue
            cost = -round(float(W.weights[i, j]) * COST_SCALE)
            edge_arcs[net.add_arc(1 + i, 1 + n + j, 1, cost)] = (i, j)
    for j in range(m):
        # a provider never needs more than n slots
        net.add_arc(1 + n + j, sink, min(K[j], n), 0)
    return net, edge_arcs


def solve_matching(W: WeightMatrix, K: CapacityVector) -> tuple[Matching, WelfareReport]:
    """Maximum-weight matching of seekers to providers under capacities ``K``."""
    K = _check_dims(W, K)
    n, m = W.weights.shape
    if K.total() == 0:
        M = Matching.empty(n)
        return M, evaluate(W, M, K)

    net, edge_arcs = build_network(W, K)
    net.min_cost_max_flow(0, n + m + 1)
    assignment: list[Optional[int]] = [None] * n
    for e, (i, j) in edge_arcs.items():
        if net.flow_on(e):
            assignment[i] = j
    M = Matching(tuple(assignment))
    return M, evaluate(W, M, K)


def brute_force_matching(W: WeightMatrix, K: CapacityVector) -> tuple[Matching, float]:
    """Enumerate every assignment (each seeker to a provider or to nobody).

    Test oracle only; limited to 8 seekers and 5 providers. Among equal-welfare
    assignments the first in enumeration order is returned.
    """
    K = _check_dims(W, K)
    n, m = W.weights.shape
    if n > BRUTE_FORCE_MAX_SEEKERS or m > BRUTE_FORCE_MAX_PROVIDERS:
        raise SizeError(
            f"brute force supports at most {BRUTE_FORCE_MAX_SEEKERS} seekers and "
            f"{BRUTE_FORCE_MAX_PROVIDERS} providers, got {n}x{m}"
        )
    # choice m encodes "unmatched" and contributes zero weight
    extended = np.hstack([W.weights, np.zeros((n, 1))])
    base = m + 1
    codes = np.arange(base ** n, dtype=np.int64)
    # column i is the base-(m+1) digit of seeker i, most significant first
    choices = np.empty((codes.size, n), dtype=np.int8)
    for i in range(n):
        choices[:, i] = (codes // base ** (n - 1 - i)) % base
    feasible = np.ones(len(choices), dtype=bool)
    for j in range(m):
        feasible &= (choices == j).sum(axis=1) <= K[j]
    choices = choices[feasible]
    welfare = extended[np.arange(n), choices].sum(axis=1)
    best = int(np.argmax(welfare))
    M = Matching(tuple(None if j == m else int(j) for j in choices[best]))
    return M, float(welfare[best])
