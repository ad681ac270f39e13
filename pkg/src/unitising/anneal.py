"""Seeded simulated annealing with Metropolis single-spin-flip dynamics.

Random numbers come from NumPy's PCG64.  Restart ``r`` of a run seeded with
``seed`` draws from ``SeedSequence(seed, spawn_key=(r,))``, so any restart
can be reproduced on its own and results do not depend on how restarts are
scheduled.  Each restart draws its initial spins first, then one block of
``sweeps * n_free`` uniforms per temperature, one uniform per attempted flip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .core import IsingModel, energy, reduce_clamps

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric cooling schedule. ``None`` fields are derived from the model."""

    t_initial: float | None = None
    t_final: float = 0.1
    alpha: float = 0.97
    sweeps_per_temperature: int | None = None
    restarts: int = 16
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.t_final <= 0:
            raise ValueError("t_final must be positive")
        if self.t_initial is not None and self.t_initial < self.t_final:
            raise ValueError("t_initial must be >= t_final")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.sweeps_per_temperature is not None and self.sweeps_per_temperature < 1:
            raise ValueError("sweeps_per_temperature must be >= 1")

    def resolve(self, h, adjacency_weights) -> "AnnealSchedule":
        n = len(h)
        t0 = self.t_initial
        if t0 is None:
            # max_i (|h_i| + sum_j |J_ij|) bounds |dE| / 2 for a single flip
            t0 = max((abs(h[i]) + adjacency_weights[i] for i in range(n)), default=1)
            t0 = max(float(t0), self.t_final)
        sweeps = self.sweeps_per_temperature or max(1, 2 * n)
        return replace(self, t_initial=float(t0), sweeps_per_temperature=sweeps)

    def temperatures(self) -> list:
        temps = []
        t = self.t_initial
        while t >= self.t_final * (1 - 1e-12):
            temps.append(t)
            t *= self.alpha
        return temps


@dataclass
class AnnealResult:
    best_assignment: dict
    best_energy: int
    certified: bool
    restarts_used: int
    flips_attempted: int
    certified_states: list = field(default_factory=list)
    restart_energies: list = field(default_factory=list)


def _restart_rng(seed: int, restart: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(restart,))))


def _csr(n, edges):
    nbrs = [[] for _ in range(n)]
    for i, j, c in edges:
        nbrs[i].append((j, c))
        nbrs[j].append((i, c))
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices, weights = [], []
    for i in range(n):
        for j, c in sorted(nbrs[i]):
            indices.append(j)
            weights.append(c)
        indptr[i + 1] = len(indices)
    return indptr, np.asarray(indices, dtype=np.int64), np.asarray(weights, dtype=np.int64)


def _sweeps_python(h, indptr, indices, weights, spins, fields, state, best_spins,
                   temperature, uniforms, target, has_target, check=None):
    """Reference kernel. ``state`` = [energy, best_energy, attempts, hit]."""
    n = len(spins)
    e, best = state[0], state[1]
    k = 0
    for _ in range(len(uniforms) // n):
        for i in range(n):
            u = uniforms[k]
            k += 1
            state[2] += 1
            de = -2 * spins[i] * fields[i]
            if de <= 0 or u < math.exp(-de / temperature):
                spins[i] = -spins[i]
                for p in range(indptr[i], indptr[i + 1]):
                    fields[indices[p]] += 2 * weights[p] * spins[i]
                e += de
                if check is not None:
                    check(spins, e)
                if e < best:
                    best = e
                    best_spins[:] = spins
                if has_target and e == target:
                    state[0], state[1], state[3] = e, best, 1
                    return
    state[0], state[1] = e, best


def _make_numba_kernel():
    @njit(cache=True)
    def kernel(h, indptr, indices, weights, spins, fields, state, best_spins,
               temperature, uniforms, target, has_target):
        n = spins.shape[0]
        e = state[0]
        best = state[1]
        k = 0
        attempts = state[2]
        for _ in range(uniforms.shape[0] // n):
            for i in range(n):
                u = uniforms[k]
                k += 1
                attempts += 1
                de = -2 * spins[i] * fields[i]
                if de <= 0 or u < math.exp(-de / temperature):
                    spins[i] = -spins[i]
                    for p in range(indptr[i], indptr[i + 1]):
                        fields[indices[p]] += 2 * weights[p] * spins[i]
                    e += de
                    if e < best:
                        best = e
                        best_spins[:] = spins
                    if has_target and e == target:
                        state[0] = e
                        state[1] = best
                        state[2] = attempts
                        state[3] = 1
                        return
        state[0] = e
        state[1] = best
        state[2] = attempts

    return kernel


_kernel_numba = _make_numba_kernel() if njit is not None else None


def anneal(model: IsingModel, clamps: Mapping | None = None,
           schedule: AnnealSchedule | None = None, target: int | None = None, *,
           stop_on_target: bool = True, debug: bool = False) -> AnnealResult:
    """Minimise ``model`` over the spins not fixed by ``clamps``.

    When ``target`` is given a restart stops as soon as it reaches that
    energy, and (with ``stop_on_target``) no further restarts are run.
    ``debug`` switches to the pure-Python kernel and re-evaluates the full
    energy after every accepted flip.
    """
    schedule = schedule or AnnealSchedule()
    clamps = dict(clamps or {})
    free, const, h, edges = reduce_clamps(model, clamps)
    n = len(free)
    if n == 0:
        e = energy(model, clamps)
        gs = {v: clamps[v] for v in model.variables}
        ok = target is not None and e == target
        return AnnealResult(gs, e, ok, 1, 0, [gs] if ok else [], [e])

    abs_w = [0] * n
    for i, j, c in edges:
        abs_w[i] += abs(c)
        abs_w[j] += abs(c)
    sched = schedule.resolve(h, abs_w)
    temps = sched.temperatures()
    indptr, indices, weights = _csr(n, edges)
    h_arr = np.asarray(h, dtype=np.int64)
    has_target = target is not None
    tgt = int(target) - const if has_target else 0

    def full_energy(spins):
        e = int(h_arr @ spins)
        for i, j, c in edges:
            e += c * int(spins[i]) * int(spins[j])
        return e

    check = None
    if debug:
        def check(spins, e):
            assert e == full_energy(spins), "incremental energy drifted"

    kernel = _kernel_numba if (_kernel_numba is not None and not debug) else None
    best_overall = None
    certified_states: dict = {}
    restart_energies = []
    attempts_total = 0
    used = 0
    for r in range(sched.restarts):
        used = r + 1
        rng = _restart_rng(sched.seed, r)
        spins = (2 * rng.integers(0, 2, size=n) - 1).astype(np.int64)
        fields = h_arr.copy()
        for p in range(n):
            fields[p] += int(weights[indptr[p]:indptr[p + 1]] @ spins[indices[indptr[p]:indptr[p + 1]]])
        e0 = full_energy(spins)
        best_spins = spins.copy()
        state = np.array([e0, e0, 0, 0], dtype=np.int64)
        if has_target and e0 == tgt:
            state[3] = 1
        for t in temps:
            if state[3]:
                break
            uniforms = rng.random(sched.sweeps_per_temperature * n)
            if kernel is not None:
                kernel(h_arr, indptr, indices, weights, spins, fields, state, best_spins,
                       float(t), uniforms, tgt, has_target)
            else:
                st = [int(x) for x in state]
                _sweeps_python(h_arr, indptr, indices, weights, spins, fields, st,
                               best_spins, float(t), uniforms, tgt, has_target, check)
                state[:] = st
        attempts_total += int(state[2])
        e_best = int(state[1]) + const
        restart_energies.append(e_best)
        assignment = dict(clamps)
        assignment.update(zip(free, (int(x) for x in best_spins)))
        assignment = {v: assignment[v] for v in model.variables}
        if best_overall is None or e_best < best_overall[0]:
            best_overall = (e_best, assignment)
        if has_target and e_best == target:
            certified_states.setdefault(tuple(assignment.values()), assignment)
            if stop_on_target:
                break
    e_best, assignment = best_overall
    return AnnealResult(
        assignment, e_best, has_target and e_best == target, used, attempts_total,
        list(certified_states.values()), restart_energies)
