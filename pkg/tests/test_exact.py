import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import models, random_model
from unitising.core import IsingModel, enumerate_ground_states
from unitising.errors import TooManyFreeVariablesError
from unitising.exact import induced_width, solve_exact


def _same(a, b):
    assert a.min_energy == b.min_energy
    assert a.gap == b.gap
    assert a.ground_states == b.ground_states


@given(models(max_vars=9), st.data())
def test_matches_enumeration(m, data):
    clamps = {v: data.draw(st.sampled_from((-1, 1))) for v in m.variables
              if data.draw(st.integers(0, 3)) == 0}
    _same(solve_exact(m, clamps), enumerate_ground_states(m, clamps))


def test_matches_enumeration_on_sparse_models(rng):
    for _ in range(40):
        m = random_model(rng, rng.randint(10, 16), density=0.2, bound=2)
        clamps = {v: rng.choice((-1, 1)) for v in m.variables if rng.random() < 0.2}
        _same(solve_exact(m, clamps), enumerate_ground_states(m, clamps))


def test_fully_clamped():
    m = IsingModel({"a": 1}, {("a", "b"): -1}, 3)
    rep = solve_exact(m, {"a": 1, "b": -1})
    assert rep.min_energy == 5 and rep.ground_states == [{"a": 1, "b": -1}] and rep.gap is None


def test_chain_has_width_two():
    quad = {(f"v{i:02d}", f"v{i + 1:02d}"): -1 for i in range(60)}
    m = IsingModel({}, quad)
    assert induced_width(m) == 2
    rep = solve_exact(m)
    assert rep.min_energy == -60 and rep.degeneracy == 2 and rep.gap == 2


def test_width_cap():
    names = [f"v{i}" for i in range(8)]
    quad = {(u, v): 1 for i, u in enumerate(names) for v in names[i + 1:]}
    with pytest.raises(TooManyFreeVariablesError):
        solve_exact(IsingModel({}, quad), max_width=4)


def test_state_cap():
    m = IsingModel(variables=[f"v{i}" for i in range(6)])
    with pytest.raises(RuntimeError):
        solve_exact(m, max_states=10)
