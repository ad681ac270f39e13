"""Gate-level netlists: data model, text format, validation and Boolean simulation.

Format (one statement per line, ``#`` starts a comment)::

    input a s b
    output x
    gate AND a ~s -> t1
    gate AND b s -> t2
    gate OR t1 t2 -> x

A pin written ``~net`` is inverted: an inverted input feeds the gate the
complement of the net, an inverted output drives the net with the complement
of the gate's result.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .core import iter_records
from .errors import CircuitError, FormatError

# kind -> (input count, output count)
ARITY = {
    "AND": (2, 1), "OR": (2, 1), "XOR": (2, 1), "XNOR": (2, 1),
    "NAND": (2, 1), "NOR": (2, 1), "HA": (2, 2), "FA": (3, 2),
}


def gate_function(kind, *bits):
    """Output bits of a gate of ``kind`` for Boolean inputs ``bits``."""
    if kind == "AND":
        return (bits[0] and bits[1],)
    if kind == "OR":
        return (bits[0] or bits[1],)
    if kind == "XOR":
        return (bits[0] != bits[1],)
    if kind == "XNOR":
        return (bits[0] == bits[1],)
    if kind == "NAND":
        return (not (bits[0] and bits[1]),)
    if kind == "NOR":
        return (not (bits[0] or bits[1]),)
    if kind == "HA":
        x, y = bits
        return (x != y, x and y)
    if kind == "FA":
        x, y, z = bits
        return ((x != y) != z, (x + y + z) >= 2)
    raise CircuitError(f"unknown gate kind {kind!r}")


@dataclass(frozen=True)
class Pin:
    net: str
    inverted: bool = False

    def __str__(self):
        return ("~" if self.inverted else "") + self.net

    @classmethod
    def parse(cls, token: str) -> "Pin":
        inv = token.startswith("~")
        net = token[1:] if inv else token
        if not net or "~" in net or net == "->":
            raise ValueError(f"bad pin {token!r}")
        return cls(net, inv)


@dataclass(frozen=True)
class GateInstance:
    kind: str
    inputs: tuple
    outputs: tuple

    def __str__(self):
        ins = " ".join(map(str, self.inputs))
        outs = " ".join(map(str, self.outputs))
        return f"gate {self.kind} {ins} -> {outs}"

    def evaluate(self, values: Mapping[str, bool]) -> dict:
        bits = [values[p.net] != p.inverted for p in self.inputs]
        outs = gate_function(self.kind, *bits)
        return {p.net: bool(o) != p.inverted for p, o in zip(self.outputs, outs)}


class Circuit:
    """A validated combinational netlist. Gates are stored in topological order."""

    def __init__(self, gates, primary_inputs, primary_outputs):
        self.primary_inputs = tuple(primary_inputs)
        self.primary_outputs = tuple(primary_outputs)
        self.gates = tuple(_validate(list(gates), self.primary_inputs, self.primary_outputs))
        nets = list(self.primary_inputs)
        for g in self.gates:
            nets += [p.net for p in g.inputs + g.outputs]
        nets += list(self.primary_outputs)
        self.nets = tuple(dict.fromkeys(nets))

    def __repr__(self):
        return (f"Circuit({len(self.gates)} gates, inputs={list(self.primary_inputs)}, "
                f"outputs={list(self.primary_outputs)})")

    def __eq__(self, other):
        return (isinstance(other, Circuit) and self.gates == other.gates
                and self.primary_inputs == other.primary_inputs
                and self.primary_outputs == other.primary_outputs)

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)

    def driver(self, net):
        """Index of the gate driving ``net`` (None for a primary input)."""
        for k, g in enumerate(self.gates):
            if any(p.net == net for p in g.outputs):
                return k
        return None


def _validate(gates, pis, pos):
    if len(set(pis)) != len(pis):
        raise CircuitError("duplicate primary input")
    if len(set(pos)) != len(pos):
        raise CircuitError("duplicate primary output")
    driver = {net: None for net in pis}
    for k, g in enumerate(gates):
        if g.kind not in ARITY:
            raise CircuitError(f"unknown gate kind {g.kind!r}", k)
        n_in, n_out = ARITY[g.kind]
        if len(g.inputs) != n_in or len(g.outputs) != n_out:
            raise CircuitError(
                f"gate {k} ({g.kind}) expects {n_in} inputs and {n_out} outputs, "
                f"got {len(g.inputs)} and {len(g.outputs)}", k)
        outs = [p.net for p in g.outputs]
        if len(set(outs)) != len(outs):
            raise CircuitError(f"gate {k} drives net {outs[0]!r} twice", k)
        for net in outs:
            if net in driver:
                what = "primary input" if driver[net] is None else f"gate {driver[net]}"
                raise CircuitError(
                    f"net {net!r} has a duplicate driver (already driven by {what})", k)
            driver[net] = k
    for k, g in enumerate(gates):
        for p in g.inputs:
            if p.net not in driver:
                raise CircuitError(f"net {p.net!r} used by gate {k} is undefined", k)
    for net in pos:
        if net not in driver:
            raise CircuitError(f"primary output {net!r} is not driven")

    # Kahn's algorithm; stable in the declared gate order
    deps = [{driver[p.net] for p in g.inputs if driver[p.net] is not None} for g in gates]
    users = [[] for _ in gates]
    for k, d in enumerate(deps):
        for j in d:
            users[j].append(k)
    remaining = [len(d) for d in deps]
    ready = [k for k, r in enumerate(remaining) if r == 0]
    order = []
    while ready:
        k = min(ready)
        ready.remove(k)
        order.append(k)
        for u in users[k]:
            remaining[u] -= 1
            if remaining[u] == 0:
                ready.append(u)
    if len(order) != len(gates):
        stuck = sorted(set(range(len(gates))) - set(order))
        raise CircuitError(f"combinational cycle through gates {stuck}", stuck[0])
    return [gates[k] for k in order]


def parse_netlist(text: str) -> Circuit:
    pis, pos, gates = [], [], []
    gate_lines = []
    for lineno, tok in iter_records(text):
        kind = tok[0]
        if kind == "input":
            pis += tok[1:]
        elif kind == "output":
            pos += tok[1:]
        elif kind == "gate":
            if len(tok) < 2 or "->" not in tok:
                raise FormatError("usage: gate <KIND> <pin>... -> <pin>...", lineno)
            gkind = tok[1].upper()
            if gkind not in ARITY:
                raise FormatError(f"unknown gate kind {tok[1]!r}", lineno)
            arrow = tok.index("->")
            try:
                ins = tuple(Pin.parse(t) for t in tok[2:arrow])
                outs = tuple(Pin.parse(t) for t in tok[arrow + 1:])
            except ValueError as exc:
                raise FormatError(str(exc), lineno) from None
            n_in, n_out = ARITY[gkind]
            if len(ins) != n_in or len(outs) != n_out:
                raise FormatError(
                    f"{gkind} takes {n_in} inputs and {n_out} outputs "
                    f"(arity mismatch: got {len(ins)} and {len(outs)})", lineno)
            gates.append(GateInstance(gkind, ins, outs))
            gate_lines.append(lineno)
        else:
            raise FormatError(f"unknown statement {kind!r}", lineno)
    try:
        return Circuit(gates, pis, pos)
    except CircuitError as exc:
        if exc.gate is None:
            raise
        raise CircuitError(f"line {gate_lines[exc.gate]}: {exc}", exc.gate) from None


def dumps_netlist(c: Circuit) -> str:
    lines = []
    if c.primary_inputs:
        lines.append("input " + " ".join(c.primary_inputs))
    if c.primary_outputs:
        lines.append("output " + " ".join(c.primary_outputs))
    lines += [str(g) for g in c.gates]
    return "\n".join(lines) + "\n"


def evaluate_circuit(c: Circuit, inputs: Mapping[str, bool]) -> dict:
    """Value of every net given the primary inputs."""
    missing = [n for n in c.primary_inputs if n not in inputs]
    extra = [n for n in inputs if n not in c.primary_inputs]
    if missing:
        raise CircuitError(f"missing primary inputs: {', '.join(missing)}")
    if extra:
        raise CircuitError(f"not primary inputs: {', '.join(map(str, extra))}")
    values = {n: bool(inputs[n]) for n in c.primary_inputs}
    for g in c.gates:
        values.update(g.evaluate(values))
    return values


def truth_table(c: Circuit) -> dict:
    """Map each input tuple (in ``primary_inputs`` order) to the output tuple."""
    from itertools import product

    table = {}
    for bits in product((False, True), repeat=len(c.primary_inputs)):
        vals = evaluate_circuit(c, dict(zip(c.primary_inputs, bits)))
        table[bits] = tuple(vals[n] for n in c.primary_outputs)
    return table


SELECTOR = """\
# x = (a AND NOT s) OR (b AND s)
input a s b
output x
gate AND a ~s -> t1
gate AND b s -> t2
gate OR t1 t2 -> x
"""
