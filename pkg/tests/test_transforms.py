import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import energies, ground_projection, models
from unitising.core import IsingModel, QuboModel, energy
from unitising.errors import MergeError, UnknownVariableError
from unitising.library import _model, published_model
from unitising.transforms import (bits_to_spins, ising_to_qubo, merge_nodes, merge_survivor,
                                  merge_wire, negate_variable, qubo_to_ising, spins_to_bits)


def test_or_with_inverted_input():
    m, _ = published_model("OR", "zu")
    assert negate_variable(m, "a") == _model("-ab -au +ax +bu -bx -u -x")


def test_xnor_from_xor():
    m, _ = published_model("XOR", "zu")
    assert negate_variable(m, "x") == _model("-ab -au -av +bu +bv -ux +vx -u +v +x")


def test_negate_unknown_variable():
    with pytest.raises(UnknownVariableError):
        negate_variable(IsingModel({"a": 1}), "b")


@given(models(), st.data())
def test_negation_conjugation_and_involution(m, data):
    v = data.draw(st.sampled_from(m.variables))
    n = negate_variable(m, v)
    assert negate_variable(n, v) == m
    for spins in itertools.product((-1, 1), repeat=len(m.variables)):
        s = dict(zip(m.variables, spins))
        flipped = {**s, v: -s[v]}
        assert energy(n, s) == energy(m, flipped)


def test_merge_isolated_pair():
    m = IsingModel({}, {("p", "q"): -1})
    merged = merge_nodes(m, "p", "q")
    assert merged == IsingModel(offset=-1, variables=["p"])


def test_merge_moves_terms():
    m = IsingModel({"q": 2}, {("p", "q"): -1, ("q", "r"): 3, ("p", "r"): -1})
    merged = merge_nodes(m, "p", "q")
    assert merged == IsingModel({"p": 2}, {("p", "r"): 2}, -1)


def test_merge_cancelling_edge_is_dropped():
    m = IsingModel({}, {("p", "q"): -1, ("q", "r"): 1, ("p", "r"): -1})
    assert merge_nodes(m, "p", "q").quadratic == {}


@pytest.mark.parametrize("model, keep, drop, err", [
    (IsingModel({}, {("p", "q"): 1}), "p", "q", MergeError),
    (IsingModel({"p": 1, "q": 1}, {("p", "q"): -1}), "p", "q", MergeError),
    (IsingModel({}, {("p", "q"): -1}), "p", "p", MergeError),
    (IsingModel({}, {("p", "q"): -1}), "p", "z", UnknownVariableError),
])
def test_merge_preconditions(model, keep, drop, err):
    with pytest.raises(err):
        merge_nodes(model, keep, drop)


def test_merge_survivor_rule():
    m = IsingModel({"b": 1}, {("a", "b"): -1, ("c", "d"): -1})
    assert merge_survivor(m, "a", "b") == "b"
    assert merge_survivor(m, "d", "c") == "c"
    merged, keep = merge_wire(m, "a", "b")
    assert keep == "b" and "a" not in merged


@given(models(max_vars=6), st.data())
def test_merge_exact_on_equal_spin_subspace(m, data):
    if len(m.variables) < 2:
        return
    keep, drop = data.draw(st.permutations(m.variables))[:2]
    quad = dict(m.quadratic)
    quad[tuple(sorted((keep, drop)))] = -1
    lin = dict(m.linear)
    lin.pop(drop, None)
    m = IsingModel(lin, quad, m.offset, m.variables)
    merged = merge_nodes(m, keep, drop)
    for spins in itertools.product((-1, 1), repeat=len(merged.variables)):
        s = dict(zip(merged.variables, spins))
        assert energy(merged, s) == energy(m, {**s, drop: s[keep]})


def test_merge_preserves_ground_projection_when_wire_holds():
    # an AND gate whose output is wired to a free consumer node
    m, _ = published_model("AND", "zu")
    wired = IsingModel(m.linear, {**m.quadratic, ("o", "x"): -1}, m.offset)
    assert all(row[0] == row[1] for row in ground_projection(wired, ["x", "o"]))
    merged = merge_nodes(wired, "x", "o")
    names = ["a", "b", "x"]
    assert ground_projection(merged, names) == ground_projection(wired, names)


# -- QUBO <-> Ising -----------------------------------------------------------------------

def test_product_to_ising():
    i = qubo_to_ising(QuboModel({}, {("x0", "x1"): 1}))
    assert i == IsingModel({"x0": 1, "x1": 1}, {("x0", "x1"): 1}, 1)
    assert energy(i, {"x0": 1, "x1": 1}) == 4


def test_single_bit_to_ising():
    i = qubo_to_ising(QuboModel({"x0": 1}))
    assert i == IsingModel({"x0": 2}, {}, 2)
    assert [energy(i, {"x0": s}) for s in (-1, 1)] == [0, 4]


def test_empty_conversions():
    assert qubo_to_ising(QuboModel()) == IsingModel()
    assert ising_to_qubo(IsingModel()) == QuboModel()


def test_and_as_qubo_minimisers():
    h_and = _model("ab -2ax -2bx -a -b +2x")
    q = ising_to_qubo(h_and)
    values = {}
    for bits in itertools.product((0, 1), repeat=3):
        values[bits] = q.energy(dict(zip(("a", "b", "x"), bits)))
    lo = min(values.values())
    assert {k for k, e in values.items() if e == lo} == {
        (a, b, a & b) for a in (0, 1) for b in (0, 1)}


@st.composite
def qubos(draw, max_vars=5):
    n = draw(st.integers(1, max_vars))
    names = [f"x{i}" for i in range(n)]
    coef = st.integers(-6, 6)
    lin = {v: draw(coef) for v in names}
    quad = {p: draw(coef) for p in itertools.combinations(names, 2)}
    return QuboModel(lin, quad, draw(st.integers(-5, 5)), names)


@given(qubos())
def test_qubo_to_ising_scales_by_four(q):
    i = qubo_to_ising(q)
    for bits in itertools.product((0, 1), repeat=len(q.variables)):
        x = dict(zip(q.variables, bits))
        assert energy(i, bits_to_spins(x)) == 4 * q.energy(x)


@given(models())
def test_ising_to_qubo_is_exact(m):
    q = ising_to_qubo(m)
    S, E = energies(m)
    for row, e in zip(S.tolist(), E.tolist()):
        s = dict(zip(m.variables, row))
        assert q.energy(spins_to_bits(s)) == e


@given(models())
def test_round_trip_from_ising_scales_by_four(m):
    back = qubo_to_ising(ising_to_qubo(m))
    assert back == IsingModel({v: 4 * c for v, c in m.linear.items()},
                              {p: 4 * c for p, c in m.quadratic.items()}, 4 * m.offset,
                              m.variables)
