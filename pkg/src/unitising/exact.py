"""Exact minimisation by min-sum variable elimination.

Brute-force enumeration (:func:`unitising.core.enumerate_ground_states`) is
limited by the number of free spins.  Compiled circuits are sparse, so their
cost is governed by the induced width of an elimination order instead.  This
solver keeps, for every table entry, the lowest and the second-lowest distinct
energy so the spectral gap comes out exactly, and it back-tracks through the
eliminated buckets to list *every* minimiser.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from .core import GroundStateReport, IsingModel, reduce_clamps
from .errors import TooManyFreeVariablesError

DEFAULT_MAX_WIDTH = 22
DEFAULT_MAX_STATES = 1 << 20


class _Factor:
    __slots__ = ("scope", "best", "second")

    def __init__(self, scope, best, second):
        self.scope = scope      # tuple of free-variable positions, axis order
        self.best = best        # float64 array of shape (2,)*len(scope)
        self.second = second    # same shape; +inf where no second level exists


def _expand(f: _Factor, scope):
    """Broadcast ``f`` onto the (superset) ``scope``."""
    perm = [f.scope.index(v) for v in scope if v in f.scope]
    best = np.transpose(f.best, perm) if perm else f.best
    second = np.transpose(f.second, perm) if perm else f.second
    shape = [2 if v in f.scope else 1 for v in scope]
    return best.reshape(shape), second.reshape(shape)


def _elimination_order(n, adjacency):
    """Greedy min-fill ordering; ties broken by min-degree then position."""
    adj = [set(a) for a in adjacency]
    alive = set(range(n))
    order = []
    while alive:
        def cost(v):
            nb = list(adj[v])
            fill = 0
            for i in range(len(nb)):
                for j in range(i + 1, len(nb)):
                    if nb[j] not in adj[nb[i]]:
                        fill += 1
            return (fill, len(nb), v)

        v = min(alive, key=cost)
        nb = list(adj[v])
        for i in range(len(nb)):
            for j in range(i + 1, len(nb)):
                adj[nb[i]].add(nb[j])
                adj[nb[j]].add(nb[i])
        for u in nb:
            adj[u].discard(v)
        alive.remove(v)
        order.append(v)
    return order


def induced_width(model: IsingModel, clamps: Mapping | None = None) -> int:
    free, _, _, edges = reduce_clamps(model, clamps)
    adjacency = [set() for _ in free]
    for i, j, _ in edges:
        adjacency[i].add(j)
        adjacency[j].add(i)
    order = _elimination_order(len(free), adjacency)
    adj = [set(a) for a in adjacency]
    width = 0
    for v in order:
        nb = adj[v]
        width = max(width, len(nb) + 1)
        for u in nb:
            adj[u] |= nb - {u}
            adj[u].discard(v)
    return width


def solve_exact(model: IsingModel, clamps: Mapping | None = None, *,
                max_width: int = DEFAULT_MAX_WIDTH,
                max_states: int = DEFAULT_MAX_STATES) -> GroundStateReport:
    """Exact ground-state report, same contract as ``enumerate_ground_states``.

    ``max_width`` caps the number of spins in any intermediate table;
    ``max_states`` caps how many minimisers are listed (a ``RuntimeError``
    is raised rather than silently truncating).
    """
    clamps = dict(clamps or {})
    free, const, h, edges = reduce_clamps(model, clamps)
    n = len(free)
    if n == 0:
        gs = {v: clamps[v] for v in model.variables}
        return GroundStateReport(const, [gs], None)

    spin = np.array([-1.0, 1.0])
    inf = np.inf
    factors: list[_Factor] = []
    for i in range(n):
        factors.append(_Factor((i,), h[i] * spin, np.full(2, inf)))
    adjacency = [set() for _ in range(n)]
    for i, j, c in edges:
        adjacency[i].add(j)
        adjacency[j].add(i)
        factors.append(_Factor((i, j), c * np.outer(spin, spin), np.full((2, 2), inf)))

    order = _elimination_order(n, adjacency)
    buckets = []  # (var, scope, combined best table) in elimination order
    pool = factors
    for v in order:
        mine = [f for f in pool if v in f.scope]
        pool = [f for f in pool if v not in f.scope]
        scope = tuple(sorted({u for f in mine for u in f.scope}))
        if len(scope) > max_width:
            raise TooManyFreeVariablesError(len(scope), max_width)
        best = np.zeros((2,) * len(scope))
        second = np.full((2,) * len(scope), inf)
        for f in mine:
            fb, fs = _expand(f, scope)
            second = np.minimum(best + fs, second + fb)
            best = best + fb
        axis = scope.index(v)
        lo, hi = np.take(best, 0, axis), np.take(best, 1, axis)
        slo, shi = np.take(second, 0, axis), np.take(second, 1, axis)
        mbest = np.minimum(lo, hi)
        cand = np.stack([lo, hi, slo, shi])
        cand = np.where(cand > mbest, cand, inf)
        msecond = cand.min(axis=0)
        buckets.append((v, scope, best))
        rest = scope[:axis] + scope[axis + 1:]
        pool.append(_Factor(rest, mbest, msecond))

    total_best = sum(float(f.best) for f in pool)
    total_second = inf
    acc_best = 0.0
    for f in pool:
        total_second = min(total_second + float(f.best), acc_best + float(f.second))
        acc_best += float(f.best)
    min_energy = const + int(round(total_best))
    gap = None if total_second == inf else int(round(total_second - total_best))

    # Backtrack: a spin value is admissible iff its bucket entry attains the
    # bucket minimum given the spins eliminated after it.
    solutions = []
    assign = [0] * n

    def rec(k):
        if k < 0:
            if len(solutions) >= max_states:
                raise RuntimeError(f"more than {max_states} ground states")
            solutions.append(list(assign))
            return
        v, scope, best = buckets[k]
        idx = tuple(slice(None) if u == v else (assign[u] + 1) // 2 for u in scope)
        vals = best[idx]
        m = vals.min()
        for bit in (0, 1):
            if vals[bit] == m:
                assign[v] = 2 * bit - 1
                rec(k - 1)
        assign[v] = 0

    rec(len(buckets) - 1)
    solutions.sort()
    ground = []
    for row in solutions:
        gs = dict(clamps)
        gs.update(zip(free, row))
        ground.append({v: gs[v] for v in model.variables})
    return GroundStateReport(min_energy, ground, gap)
