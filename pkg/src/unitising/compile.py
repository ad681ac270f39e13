"""Compile gate netlists into Ising models and run them forwards and backwards.

Every gate instance ``k`` contributes a private copy of its library model
with variables renamed ``g<k>.<pin>``; every primary input and output gets an
uncoloured node named after its net.  Each net's driver is tied to each of its
consumers by a -1 *wire* edge.  With ``merge=True`` each wire component whose
nodes carry at most one non-zero linear term (and no couplings other than
its wires) is contracted into a single node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .anneal import AnnealSchedule, anneal
from .circuit import Circuit
from .core import DEFAULT_FREE_LIMIT, IsingModel, enumerate_ground_states
from .errors import CompileError, SolverFailure, UnsatisfiableError
from .exact import solve_exact
from .library import GateLibrary
from .transforms import WIRE, merge_survivor, merge_nodes, negate_variable

DEFAULT_VARIANT = "zu"


@dataclass
class CompiledModel:
    model: IsingModel
    net_map: dict
    per_gate_mu: list
    expected_ground_energy: int
    circuit: Circuit
    wires: int = 0
    merged_components: int = 0
    kept_components: list = field(default_factory=list)
    gate_vars: list = field(default_factory=list)

    def clamps(self, values: Mapping[str, bool]) -> dict:
        return {self.net_map[n]: (1 if v else -1) for n, v in values.items()}

    def decode(self, state: Mapping, nets) -> dict:
        return {n: state[self.net_map[n]] == 1 for n in nets}


def _variant_for(variants, kind):
    if variants is None:
        return DEFAULT_VARIANT
    if isinstance(variants, str):
        return variants
    return variants.get(kind, variants.get("*", DEFAULT_VARIANT))


def compile_circuit(c: Circuit, lib: GateLibrary | None = None, variants=None,
                    merge: bool = True) -> CompiledModel:
    """Build the composed model for ``c``.

    ``variants`` is a single variant name, or a dict ``kind -> variant``
    (key ``"*"`` sets the fallback).
    """
    lib = lib or GateLibrary.default()
    linear: dict = {}
    quadratic: dict = {}
    per_gate_mu = []
    gate_vars = []
    # net -> driver variable, list of consumer variables
    driver: dict = {}
    consumers: dict = {}
    for net in c.primary_inputs:
        driver[net] = net
    for k, g in enumerate(c.gates):
        res = lib.get(g.kind, _variant_for(variants, g.kind))
        spec_pins = _pin_names(res, g)
        local = res.model
        for pin_name, pin in spec_pins:
            if pin.inverted:
                local = negate_variable(local, pin_name)
        rename = {v: f"g{k}.{v}" for v in local.variables}
        local = local.relabel(rename)
        for v, coef in local.linear.items():
            linear[v] = linear.get(v, 0) + coef
        for p, coef in local.quadratic.items():
            quadratic[p] = quadratic.get(p, 0) + coef
        for v in local.variables:
            linear.setdefault(v, 0)
        n_in = len(g.inputs)
        for idx, (pin_name, pin) in enumerate(spec_pins):
            var = rename[pin_name]
            if idx < n_in:
                consumers.setdefault(pin.net, []).append(var)
            else:
                driver[pin.net] = var
        per_gate_mu.append(res.mu)
        gate_vars.append(rename)
    for net in c.primary_outputs:
        if net not in c.primary_inputs:
            consumers.setdefault(net, []).append(net)
    net_map = {net: net for net in c.primary_inputs}
    for net in c.primary_outputs:
        if net not in net_map:
            net_map[net] = net

    wires = []
    for net in c.nets:
        for var in consumers.get(net, []):
            wires.append((driver[net], var))
    for a, b in wires:
        key = (a, b) if a <= b else (b, a)
        if key in quadratic:
            raise CompileError(f"wire {a} -- {b} collides with an existing coupling")
        quadratic[key] = WIRE
    variables = set(linear) | set(net_map.values()) | {v for w in wires for v in w}
    model = IsingModel(linear, quadratic, 0, variables)
    expected = sum(per_gate_mu) + WIRE * len(wires)

    cm = CompiledModel(model, net_map, per_gate_mu, expected, c, wires=len(wires),
                       gate_vars=gate_vars)
    if merge:
        _merge_components(cm, wires)
    return cm


def _pin_names(res, g):
    """Pair each spec pin of the gate's model with the circuit pin it serves."""
    from .gate_synth import builtin_spec

    spec = builtin_spec(g.kind)
    pins = list(g.inputs) + list(g.outputs)
    return list(zip(spec.variables, pins))


def _components(wires):
    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in wires:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict = {}
    for a, b in wires:
        groups.setdefault(find(a), []).append((a, b))
    return [groups[r] for r in sorted(groups)]


def _merge_components(cm: CompiledModel, wires):
    model = cm.model
    rename = {}
    for comp in _components(wires):
        nodes = sorted({v for w in comp for v in w})
        coloured = [v for v in nodes if model.get_linear(v) != 0]
        wire_set = {frozenset(w) for w in comp}
        extra = [
            (u, v) for i, u in enumerate(nodes) for v in nodes[i + 1:]
            if model.get_quadratic(u, v) and frozenset((u, v)) not in wire_set
        ]
        if len(coloured) > 1 or extra:
            reason = (f"{len(coloured)} coloured nodes {coloured}" if len(coloured) > 1
                      else f"internal couplings {extra}")
            cm.kept_components.append({"nodes": nodes, "reason": reason})
            continue
        # contract the tree of wires edge by edge, always keeping the canonical survivor
        current = {v: v for v in nodes}

        def live(v):
            while current[v] != v:
                v = current[v]
            return v

        for a, b in sorted(comp):
            a, b = live(a), live(b)
            keep = merge_survivor(model, a, b)
            drop = b if keep == a else a
            model = merge_nodes(model, keep, drop)
            current[drop] = keep
        survivor = live(nodes[0])
        for v in nodes:
            rename[v] = survivor
        cm.merged_components += 1
    cm.model = model
    cm.net_map = {n: rename.get(v, v) for n, v in cm.net_map.items()}
    cm.gate_vars = [{p: rename.get(v, v) for p, v in gv.items()} for gv in cm.gate_vars]


# -- solving ------------------------------------------------------------------------

EXACT = "exact"
BRUTE = "brute"


def solve(model: IsingModel, clamps: Mapping, solver=EXACT, target=None):
    """Dispatch to a solver; returns a GroundStateReport or an AnnealResult."""
    if isinstance(solver, AnnealSchedule):
        return anneal(model, clamps, solver, target=target)
    if solver == EXACT:
        return solve_exact(model, clamps)
    if solver == BRUTE:
        return enumerate_ground_states(model, clamps, DEFAULT_FREE_LIMIT)
    raise ValueError(f"unknown solver {solver!r}")


def _check_nets(values, allowed, what):
    extra = [n for n in values if n not in allowed]
    if extra:
        raise CompileError(f"not {what}: {', '.join(map(str, extra))}")


def forward_simulate(cm: CompiledModel, inputs: Mapping[str, bool], solver=EXACT) -> dict:
    """Clamp the primary inputs and read the primary outputs off a ground state."""
    c = cm.circuit
    _check_nets(inputs, c.primary_inputs, "primary inputs")
    missing = [n for n in c.primary_inputs if n not in inputs]
    if missing:
        raise CompileError(f"missing primary inputs: {', '.join(missing)}")
    res = solve(cm.model, cm.clamps(inputs), solver, target=cm.expected_ground_energy)
    if isinstance(solver, AnnealSchedule):
        if not res.certified:
            raise SolverFailure(
                f"annealer reached {res.best_energy}, expected {cm.expected_ground_energy}")
        return cm.decode(res.best_assignment, c.primary_outputs)
    if res.min_energy != cm.expected_ground_energy:
        raise SolverFailure(
            f"ground energy {res.min_energy} != expected {cm.expected_ground_energy}")
    outs = {tuple(cm.decode(gs, c.primary_outputs).items()) for gs in res.ground_states}
    if len(outs) != 1:
        raise SolverFailure(f"ground states disagree on the outputs: {sorted(outs)}")
    return dict(outs.pop())


def backward_simulate(cm: CompiledModel, outputs: Mapping[str, bool], solver=EXACT,
                      *, collect_restarts: bool = True) -> list:
    """All primary-input assignments consistent with the clamped outputs.

    The exact solvers return the complete preimage; the annealer returns the
    distinct inputs of the certified ground states it found.
    """
    c = cm.circuit
    _check_nets(outputs, c.primary_outputs, "primary outputs")
    clamps = cm.clamps(outputs)
    if isinstance(solver, AnnealSchedule):
        res = anneal(cm.model, clamps, solver, target=cm.expected_ground_energy,
                     stop_on_target=not collect_restarts)
        if not res.certified:
            raise SolverFailure(
                f"annealer reached {res.best_energy}, expected {cm.expected_ground_energy}")
        states = res.certified_states
    else:
        res = solve(cm.model, clamps, solver)
        if res.min_energy > cm.expected_ground_energy:
            raise UnsatisfiableError(
                f"no input produces {dict(outputs)} (min energy {res.min_energy} > "
                f"{cm.expected_ground_energy})")
        if res.min_energy < cm.expected_ground_energy:
            raise SolverFailure("energy below the consistency bound; model is unsound")
        states = res.ground_states
    seen = {}
    for gs in states:
        key = tuple(gs[cm.net_map[n]] for n in c.primary_inputs)
        seen.setdefault(key, None)
    return [{n: v == 1 for n, v in zip(c.primary_inputs, key)} for key in sorted(seen)]
