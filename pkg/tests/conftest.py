import itertools
import random

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from unitising.core import IsingModel

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# criterion number -> summary line, filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])


# -- independent oracles --------------------------------------------------------------

def all_spins(n):
    """Every ±1 vector of length n, first coordinate most significant."""
    return np.array(list(itertools.product((-1, 1), repeat=n)), dtype=np.int64).reshape(-1, n)


def energies(model, order=None):
    """Energy of every assignment, straight from the coefficient dicts."""
    order = list(order or model.variables)
    S = all_spins(len(order))
    col = {v: S[:, i] for i, v in enumerate(order)}
    E = np.full(len(S), model.offset, dtype=np.int64)
    for v, c in model.linear.items():
        E += c * col[v]
    for (u, v), c in model.quadratic.items():
        E += c * col[u] * col[v]
    return S, E


def ground_projection(model, names, clamps=None):
    """Distinct projections onto ``names`` of the clamped ground states."""
    clamps = clamps or {}
    order = list(model.variables)
    S, E = energies(model, order)
    mask = np.ones(len(S), dtype=bool)
    for v, s in clamps.items():
        mask &= S[:, order.index(v)] == s
    E = np.where(mask, E, np.iinfo(np.int64).max)
    best = E.min()
    idx = [order.index(n) for n in names]
    return {tuple(row) for row in S[E == best][:, idx].tolist()}


def random_model(rng, n, density=0.5, bound=3, offset=True):
    names = [f"v{i}" for i in range(n)]
    lin = {v: rng.randint(-bound, bound) for v in names}
    quad = {}
    for u, v in itertools.combinations(names, 2):
        if rng.random() < density:
            quad[(u, v)] = rng.randint(-bound, bound)
    return IsingModel(lin, quad, rng.randint(-5, 5) if offset else 0, names)


@st.composite
def models(draw, max_vars=6, bound=4):
    n = draw(st.integers(1, max_vars))
    names = [f"q{i}" for i in range(n)]
    coef = st.integers(-bound, bound)
    lin = {v: draw(coef) for v in names}
    quad = {p: draw(coef) for p in itertools.combinations(names, 2) if draw(st.booleans())}
    return IsingModel(lin, quad, draw(st.integers(-10, 10)), names)


@pytest.fixture
def rng():
    return random.Random(20240611)
