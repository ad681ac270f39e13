"""Energy-preserving rewrites of integer quadratic models."""

from __future__ import annotations

from .core import IsingModel, QuboModel
from .errors import MergeError, UnknownVariableError

WIRE = -1


def negate_variable(model: IsingModel, v) -> IsingModel:
    """Substitute ``v -> -v``: energy(new, s) == energy(model, s with s[v] flipped)."""
    if v not in model:
        raise UnknownVariableError(f"unknown variable {v!r}")
    linear = {u: (-c if u == v else c) for u, c in model.linear.items()}
    quadratic = {p: (-c if v in p else c) for p, c in model.quadratic.items()}
    return IsingModel(linear, quadratic, model.offset, model.variables)


def merge_nodes(model: IsingModel, keep, drop) -> IsingModel:
    """Contract the wire edge ``{keep, drop}`` into the single node ``keep``.

    Exact on the subspace ``s[keep] == s[drop]``: the -1 wire term becomes
    a constant, the linear and quadratic terms of ``drop`` move onto ``keep``.
    """
    if keep == drop:
        raise MergeError(f"merging {keep!r} with itself would create a self-pair")
    for v in (keep, drop):
        if v not in model:
            raise UnknownVariableError(f"unknown variable {v!r}")
    if model.get_quadratic(keep, drop) != WIRE:
        raise MergeError(f"no wire edge (coefficient -1) between {keep!r} and {drop!r}")
    if model.get_linear(keep) and model.get_linear(drop):
        raise MergeError(f"both {keep!r} and {drop!r} carry linear terms")

    linear = dict(model.linear)
    moved = linear.pop(drop, 0)
    if moved:
        linear[keep] = linear.get(keep, 0) + moved
    quadratic = {}
    for (a, b), c in model.quadratic.items():
        if {a, b} == {keep, drop}:
            continue
        a = keep if a == drop else a
        b = keep if b == drop else b
        key = (a, b) if a <= b else (b, a)
        quadratic[key] = quadratic.get(key, 0) + c
    variables = [u for u in model.variables if u != drop]
    return IsingModel(linear, quadratic, model.offset + WIRE, variables)


def merge_survivor(model: IsingModel, u, v):
    """Name that survives merging ``u`` and ``v``: the coloured one, else the smaller."""
    cu, cv = model.get_linear(u) != 0, model.get_linear(v) != 0
    if cu and not cv:
        return u
    if cv and not cu:
        return v
    return min(u, v)


def merge_wire(model: IsingModel, u, v):
    """Merge along wire ``{u, v}`` in the canonical direction; returns (model, survivor)."""
    keep = merge_survivor(model, u, v)
    drop = v if keep == u else u
    return merge_nodes(model, keep, drop), keep


def qubo_to_ising(q: QuboModel) -> IsingModel:
    """Ising model with energy_I(s) == 4 * energy_Q((s + 1) / 2) for every s.

    Quadratic coefficients carry over unchanged; all other terms pick up the
    x = (s + 1) / 2 expansion scaled by 4 to stay integral.
    """
    linear = {v: 2 * w for v, w in q.linear.items()}
    offset = 4 * q.offset + 2 * sum(q.linear.values())
    for (u, v), w in q.quadratic.items():
        linear[u] = linear.get(u, 0) + w
        linear[v] = linear.get(v, 0) + w
        offset += w
    return IsingModel(linear, dict(q.quadratic), offset, q.variables)


def ising_to_qubo(model: IsingModel) -> QuboModel:
    """QUBO with energy_Q(x) == energy_I(2x - 1) for every x (no scaling)."""
    linear = {v: 2 * h for v, h in model.linear.items()}
    quadratic = {}
    offset = model.offset - sum(model.linear.values())
    for (u, v), j in model.quadratic.items():
        quadratic[(u, v)] = 4 * j
        linear[u] = linear.get(u, 0) - 2 * j
        linear[v] = linear.get(v, 0) - 2 * j
        offset += j
    return QuboModel(linear, quadratic, offset, model.variables)


def spins_to_bits(s):
    return {v: (x + 1) // 2 for v, x in s.items()}


def bits_to_spins(x):
    return {v: 2 * b - 1 for v, b in x.items()}
