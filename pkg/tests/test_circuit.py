import itertools

import pytest

from unitising.circuit import (ARITY, SELECTOR, Circuit, GateInstance, Pin, dumps_netlist,
                               evaluate_circuit, gate_function, parse_netlist, truth_table)
from unitising.errors import CircuitError, FormatError

REFERENCE = {
    "AND": lambda a, b: (a & b,),
    "OR": lambda a, b: (a | b,),
    "XOR": lambda a, b: (a ^ b,),
    "XNOR": lambda a, b: (1 - (a ^ b),),
    "NAND": lambda a, b: (1 - (a & b),),
    "NOR": lambda a, b: (1 - (a | b),),
    "HA": lambda x, y: ((x + y) % 2, (x + y) // 2),
    "FA": lambda x, y, z: ((x + y + z) % 2, (x + y + z) // 2),
}


def test_single_gate():
    c = parse_netlist("input a b\noutput x\ngate AND a b -> x\n")
    assert len(c.gates) == 1 and c.primary_inputs == ("a", "b") and c.primary_outputs == ("x",)


def test_selector_structure():
    c = parse_netlist(SELECTOR)
    assert [g.kind for g in c.gates] == ["AND", "AND", "OR"]
    assert set(c.primary_inputs) == {"a", "s", "b"} and c.primary_outputs == ("x",)
    assert c.gates[0].inputs[1] == Pin("s", True)


def test_selector_semantics():
    c = parse_netlist(SELECTOR)
    assert evaluate_circuit(c, {"a": True, "s": False, "b": True})["x"] is True
    for a, s, b in itertools.product((False, True), repeat=3):
        assert evaluate_circuit(c, {"a": a, "s": s, "b": b})["x"] == (b if s else a)


def test_full_adder_example():
    c = parse_netlist("input x y z\noutput s c\ngate FA x y z -> s c\n")
    vals = evaluate_circuit(c, {"x": True, "y": True, "z": False})
    assert vals["s"] is False and vals["c"] is True


@pytest.mark.parametrize("kind", sorted(ARITY))
def test_gate_semantics_with_all_polarities(kind):
    n_in, n_out = ARITY[kind]
    ins = [f"i{k}" for k in range(n_in)]
    outs = [f"o{k}" for k in range(n_out)]
    for pol in itertools.product((False, True), repeat=n_in + n_out):
        g = GateInstance(kind, tuple(Pin(n, p) for n, p in zip(ins, pol)),
                         tuple(Pin(n, p) for n, p in zip(outs, pol[n_in:])))
        c = Circuit([g], ins, outs)
        for bits in itertools.product((0, 1), repeat=n_in):
            seen = [b ^ p for b, p in zip(bits, pol)]
            expected = [o ^ p for o, p in zip(REFERENCE[kind](*seen), pol[n_in:])]
            vals = evaluate_circuit(c, {n: bool(b) for n, b in zip(ins, bits)})
            assert [int(vals[n]) for n in outs] == expected
        assert tuple(map(int, gate_function(kind, *[True] * n_in))) == REFERENCE[kind](*[1] * n_in)


def test_gates_sorted_topologically():
    text = "input a b\noutput y\ngate OR t b -> y\ngate AND a b -> t\n"
    c = parse_netlist(text)
    assert [g.kind for g in c.gates] == ["AND", "OR"]
    assert evaluate_circuit(c, {"a": True, "b": False})["y"] is False


def test_round_trip():
    c = parse_netlist(SELECTOR)
    text = dumps_netlist(c)
    assert parse_netlist(text) == c
    assert dumps_netlist(parse_netlist(text)) == text


@pytest.mark.parametrize("text, err, needle", [
    ("input a b c d\noutput x\ngate AND a b -> x\ngate OR c d -> x\n", CircuitError,
     "duplicate driver"),
    ("input a\noutput x\ngate AND a q -> x\n", CircuitError, "undefined"),
    ("input a\noutput x\ngate AND a y -> x\ngate AND a x -> y\n", CircuitError, "cycle"),
    ("input a b\noutput x\ngate AND a -> x\n", FormatError, "arity"),
    ("input a b\noutput x\ngate AND a b x\n", FormatError, "usage"),
    ("input a b\noutput x\ngate MUX a b -> x\n", FormatError, "unknown gate"),
    ("input a b\noutput x\nwire a b\n", FormatError, "unknown statement"),
    ("input a b\noutput x y\ngate AND a b -> x\n", CircuitError, "not driven"),
    ("input a a\noutput a\n", CircuitError, "duplicate primary input"),
    ("input a b\noutput x\ngate AND a ~ -> x\n", FormatError, "bad pin"),
])
def test_parse_errors(text, err, needle):
    with pytest.raises(err, match=needle):
        parse_netlist(text)


def test_errors_carry_line_numbers():
    with pytest.raises(FormatError) as e:
        parse_netlist("input a b\n\noutput x\ngate AND a -> x\n")
    assert e.value.line == 4
    with pytest.raises(CircuitError, match="line 4"):
        parse_netlist("input a b c d\noutput x\ngate AND a b -> x\ngate OR c d -> x\n")


def test_input_validation():
    c = parse_netlist(SELECTOR)
    with pytest.raises(CircuitError, match="missing"):
        evaluate_circuit(c, {"a": True})
    with pytest.raises(CircuitError, match="not primary"):
        evaluate_circuit(c, {"a": True, "s": True, "b": True, "z": True})


def test_truth_table_size():
    assert len(truth_table(parse_netlist(SELECTOR))) == 8


def test_driver_lookup():
    c = parse_netlist(SELECTOR)
    assert c.driver("x") == 2 and c.driver("a") is None
    assert c.count("AND") == 2
