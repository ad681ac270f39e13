"""Grade-school array multiplier: circuit generator, multiplication and factoring.

Layout for n-bit operands X, Y with product S:

* AND array: ``p{i}_{j} = x_i AND y_j``.  Under the odd-operand assumption
  (``x0 = y0 = s0 = 1``) only ``1 <= i, j <= n-1`` need gates, and
  ``p{i}_0 = x_i``, ``p0_{j} = y_j`` are wired straight from the inputs.
* adder array: row ``j = 1 .. n-1`` adds ``(X * y_j) << j`` to the running
  sum with a ripple of one half adder followed by full adders.  Row 1 has no
  incoming carry at its top column, so it ends in a second half adder.

This uses ``n`` half adders and ``n^2 - 2n`` full adders in ``n - 1`` rows of
``n`` cells.
"""

from __future__ import annotations

from dataclasses import dataclass

from .anneal import AnnealSchedule
from .circuit import Circuit, GateInstance, Pin, evaluate_circuit
from .compile import (EXACT, CompiledModel, backward_simulate, compile_circuit,
                      forward_simulate)
from .errors import UnitIsingError
from .library import GateLibrary

MULTIPLIER_VARIANTS = {"AND": "u", "HA": "zu", "FA": "zu"}


class OperandError(UnitIsingError, ValueError):
    pass


@dataclass(frozen=True)
class MultiplierSpec:
    n: int
    odd_assumption: bool = True

    def __post_init__(self):
        if self.n < 2:
            raise OperandError("multiplier width n must be at least 2")

    @property
    def x_inputs(self) -> list:
        return [f"x{i}" for i in range(self.low, self.n)]

    @property
    def y_inputs(self) -> list:
        return [f"y{j}" for j in range(self.low, self.n)]

    @property
    def outputs(self) -> list:
        return [f"s{k}" for k in range(self.low, 2 * self.n)]

    @property
    def low(self) -> int:
        return 1 if self.odd_assumption else 0


@dataclass
class MultiplierStats:
    and_gates: int
    half_adders: int
    full_adders: int
    model_nodes: int
    model_edges: int
    max_abs_coef: int


def build_multiplier(spec: MultiplierSpec) -> Circuit:
    n = spec.n
    gates = []

    def partial(i, j):
        if spec.odd_assumption and i == 0:
            return f"y{j}"
        if spec.odd_assumption and j == 0:
            return f"x{i}"
        return f"p{i}_{j}"

    for j in range(n):
        for i in range(n):
            if spec.odd_assumption and (i == 0 or j == 0):
                continue
            # y_j on the uncoloured pin, x_i on the coloured one (see u-variant AND)
            gates.append(GateInstance("AND", (Pin(f"y{j}"), Pin(f"x{i}")), (Pin(partial(i, j)),)))

    # acc[c] = net holding bit c of the running sum (row 0 is X * y0)
    acc = {i: partial(i, 0) for i in range(n)}
    if not spec.odd_assumption:
        acc[0] = "s0"
        gates = [_rename_output(g, "p0_0", "s0") for g in gates]
    for j in range(1, n):
        last = j == n - 1
        carry = None
        for c in range(j, j + n):
            i = c - j
            top = c == j + n - 1
            # column j is final after row j; every column is final after the last row
            s_net = f"s{c}" if (c == j or last) else f"r{j}_s{c}"
            c_net = f"s{c + 1}" if (last and top) else f"r{j}_c{c + 1}"
            p = Pin(partial(i, j))
            if carry is None:
                gates.append(GateInstance("HA", (Pin(acc[c]), p), (Pin(s_net), Pin(c_net))))
            elif c not in acc:
                gates.append(GateInstance("HA", (p, Pin(carry)), (Pin(s_net), Pin(c_net))))
            else:
                gates.append(GateInstance("FA", (Pin(acc[c]), p, Pin(carry)),
                                          (Pin(s_net), Pin(c_net))))
            acc[c] = s_net
            carry = c_net
        acc[j + n] = carry
    pis = spec.x_inputs + spec.y_inputs
    return Circuit(gates, pis, spec.outputs)


def _rename_output(g, old, new):
    outs = tuple(Pin(new, p.inverted) if p.net == old else p for p in g.outputs)
    return GateInstance(g.kind, g.inputs, outs)


def operand_bits(spec: MultiplierSpec, X: int, Y: int) -> dict:
    n = spec.n
    for name, v in (("X", X), ("Y", Y)):
        if not 0 <= v < 2 ** n:
            raise OperandError(f"{name}={v} does not fit in {n} bits")
        if spec.odd_assumption and v % 2 == 0:
            raise OperandError(f"{name}={v} is even but the odd-operand assumption is on")
    bits = {}
    for i in range(spec.low, n):
        bits[f"x{i}"] = bool((X >> i) & 1)
        bits[f"y{i}"] = bool((Y >> i) & 1)
    return bits


def product_bits(spec: MultiplierSpec, S: int) -> dict:
    if not 0 <= S < 2 ** (2 * spec.n):
        raise OperandError(f"S={S} does not fit in {2 * spec.n} bits")
    if spec.odd_assumption and S % 2 == 0:
        raise OperandError(f"S={S} is even but the odd-operand assumption is on")
    return {f"s{k}": bool((S >> k) & 1) for k in range(spec.low, 2 * spec.n)}


def decode(values: dict, prefix: str, width: int, odd: bool) -> int:
    total = 1 if odd else 0
    for k in range(1 if odd else 0, width):
        if values.get(f"{prefix}{k}"):
            total |= 1 << k
    return total


_cache: dict = {}


def compile_multiplier(spec: MultiplierSpec, variants=None, merge: bool = True,
                       lib: GateLibrary | None = None) -> CompiledModel:
    variants = variants or MULTIPLIER_VARIANTS
    key = (spec, tuple(sorted(variants.items())) if isinstance(variants, dict) else variants,
           merge, lib is None)
    if lib is None and key in _cache:
        return _cache[key]
    cm = compile_circuit(build_multiplier(spec), lib, variants, merge)
    if lib is None:
        _cache[key] = cm
    return cm


def multiply_circuit(spec: MultiplierSpec, X: int, Y: int) -> int:
    """Product by Boolean simulation of the generated circuit."""
    vals = evaluate_circuit(build_multiplier(spec), operand_bits(spec, X, Y))
    return decode(vals, "s", 2 * spec.n, spec.odd_assumption)


def multiply(spec: MultiplierSpec, X: int, Y: int, solver=EXACT) -> int:
    """Product read from a ground state of the compiled model with X, Y clamped."""
    cm = compile_multiplier(spec)
    outs = forward_simulate(cm, operand_bits(spec, X, Y), solver)
    return decode(outs, "s", 2 * spec.n, spec.odd_assumption)


def factor(spec: MultiplierSpec, S: int, solver=EXACT) -> list:
    """All operand pairs (X, Y) found in ground states with the product clamped to S.

    Every returned pair is re-multiplied as a check; the exact solver returns
    the complete list, the annealer the pairs it certified.
    """
    cm = compile_multiplier(spec)
    if isinstance(solver, AnnealSchedule):
        from .anneal import anneal

        res = anneal(cm.model, cm.clamps(product_bits(spec, S)), solver,
                     target=cm.expected_ground_energy)
        if not res.certified:
            from .errors import SolverFailure

            raise SolverFailure(
                f"annealer best energy {res.best_energy} after {res.restarts_used} restarts, "
                f"expected {cm.expected_ground_energy}")
        states = [cm.decode(s, cm.circuit.primary_inputs) for s in res.certified_states]
    else:
        states = backward_simulate(cm, product_bits(spec, S), solver)
    pairs = set()
    for vals in states:
        X = decode(vals, "x", spec.n, spec.odd_assumption)
        Y = decode(vals, "y", spec.n, spec.odd_assumption)
        if X * Y != S:
            raise UnitIsingError(f"decoded {X} x {Y} != {S}")
        pairs.add((X, Y))
    return sorted(pairs)


def model_stats(spec: MultiplierSpec, variants=None) -> MultiplierStats:
    c = build_multiplier(spec)
    cm = compile_multiplier(spec, variants)
    return MultiplierStats(
        and_gates=c.count("AND"),
        half_adders=c.count("HA"),
        full_adders=c.count("FA"),
        model_nodes=len(cm.model.variables),
        model_edges=len(cm.model.quadratic),
        max_abs_coef=cm.model.max_abs(),
    )
