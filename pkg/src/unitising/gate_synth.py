"""Synthesis of integer penalty models for small Boolean relations.

A penalty model for a relation R over gate pins is an Ising model H (possibly
with extra *ancilla* spins that are minimised away) such that

* every consistent pin assignment reaches the ground energy ``mu`` for some
  ancilla completion and never goes below it, and
* every inconsistent pin assignment stays at ``mu + 1`` or above for all
  ancilla completions.

:func:`synthesize` searches every coefficient vector in ``[-bound, bound]^k``
and returns the lexicographic minimum of the objectives (``MAX_ABS``,
``INPUT_NUM``, ``QUAD_NUM`` in a chosen priority), ties broken by the smallest
coefficient vector (quadratic terms first, then linear, in pin order).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import IsingModel, iter_records
from .errors import FormatError, SynthesisError, UnknownVariableError

MAX_ABS = "MAX_ABS"
INPUT_NUM = "INPUT_NUM"
QUAD_NUM = "QUAD_NUM"
OBJECTIVES = (MAX_ABS, INPUT_NUM, QUAD_NUM)
DEFAULT_PRIORITY = (MAX_ABS, INPUT_NUM, QUAD_NUM)
QUAD_FIRST = (MAX_ABS, QUAD_NUM, INPUT_NUM)

MAX_VARIABLES = 7
# Largest coefficient hypercube the plain enumeration will walk.
EXHAUSTIVE_LIMIT = 60_000_000
_CHUNK = 1 << 18
_ANCILLA_NAMES = ("u", "v", "w", "t", "r", "q", "p")


# -- gate specifications --------------------------------------------------------

@dataclass(frozen=True)
class GateSpec:
    """A Boolean relation over ordered input and output pins.

    ``relation`` holds the consistent rows as ±1 tuples over
    ``inputs + outputs``.
    """

    name: str
    inputs: tuple
    outputs: tuple
    relation: frozenset

    def __post_init__(self):
        names = self.inputs + self.outputs
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate pin names in {names}")
        if not self.inputs or not self.outputs:
            raise ValueError("a gate needs at least one input and one output")
        for row in self.relation:
            if len(row) != len(names) or any(v not in (-1, 1) for v in row):
                raise ValueError(f"bad relation row {row!r}")

    @property
    def variables(self) -> tuple:
        return self.inputs + self.outputs

    def is_consistent(self, row) -> bool:
        return tuple(row) in self.relation

    def is_function(self) -> bool:
        seen = {}
        for row in self.relation:
            key = row[:len(self.inputs)]
            if key in seen:
                return False
            seen[key] = row
        return len(seen) == 2 ** len(self.inputs)

    def rows(self):
        """All ±1 assignments to the pins in canonical order, with consistency flags."""
        for row in itertools.product((-1, 1), repeat=len(self.variables)):
            yield row, row in self.relation

    def output_of(self, inputs: Sequence[int]) -> tuple:
        key = tuple(inputs)
        for row in sorted(self.relation):
            if row[:len(self.inputs)] == key:
                return row[len(self.inputs):]
        raise KeyError(f"no consistent row for inputs {key}")

    @classmethod
    def from_function(cls, name, inputs, outputs, fn: Callable) -> "GateSpec":
        """Build the function graph of ``fn`` (bools in, tuple of bools out)."""
        rows = set()
        for bits in itertools.product((False, True), repeat=len(inputs)):
            outs = fn(*bits)
            if isinstance(outs, bool):
                outs = (outs,)
            rows.add(tuple(1 if b else -1 for b in bits + tuple(outs)))
        return cls(name, tuple(inputs), tuple(outputs), frozenset(rows))


def _maj(x, y, z):
    return (x + y + z) >= 2


BUILTIN_SPECS = {
    "AND": GateSpec.from_function("AND", ("a", "b"), ("x",), lambda a, b: a and b),
    "OR": GateSpec.from_function("OR", ("a", "b"), ("x",), lambda a, b: a or b),
    "XOR": GateSpec.from_function("XOR", ("a", "b"), ("x",), lambda a, b: a != b),
    "XNOR": GateSpec.from_function("XNOR", ("a", "b"), ("x",), lambda a, b: a == b),
    "NAND": GateSpec.from_function("NAND", ("a", "b"), ("x",), lambda a, b: not (a and b)),
    "NOR": GateSpec.from_function("NOR", ("a", "b"), ("x",), lambda a, b: not (a or b)),
    "HA": GateSpec.from_function("HA", ("x", "y"), ("s", "c"), lambda x, y: (x != y, x and y)),
    "FA": GateSpec.from_function(
        "FA", ("x", "y", "z"), ("s", "c"), lambda x, y, z: ((x ^ y) ^ z, _maj(x, y, z))),
}


def builtin_spec(name: str) -> GateSpec:
    try:
        return BUILTIN_SPECS[name.upper()]
    except KeyError:
        raise UnknownVariableError(
            f"unknown gate {name!r}; choose from {', '.join(BUILTIN_SPECS)}") from None


def loads_spec(text: str, name: str = "custom") -> GateSpec:
    """Parse ``inputs ...`` / ``outputs ...`` / ``row ±1 ...`` lines."""
    inputs = outputs = None
    rows = set()
    for lineno, tok in iter_records(text):
        kind = tok[0]
        if kind == "inputs":
            if inputs is not None:
                raise FormatError("duplicate inputs line", lineno)
            inputs = tuple(tok[1:])
        elif kind == "outputs":
            if outputs is not None:
                raise FormatError("duplicate outputs line", lineno)
            outputs = tuple(tok[1:])
        elif kind == "row":
            if inputs is None or outputs is None:
                raise FormatError("row before inputs/outputs", lineno)
            try:
                vals = tuple(int(t) for t in tok[1:])
            except ValueError:
                raise FormatError("row values must be -1 or +1", lineno) from None
            if len(vals) != len(inputs) + len(outputs) or any(v not in (-1, 1) for v in vals):
                raise FormatError(f"expected {len(inputs) + len(outputs)} values of ±1", lineno)
            if vals in rows:
                raise FormatError("duplicate row", lineno)
            rows.add(vals)
        elif kind == "name":
            name = tok[1]
        else:
            raise FormatError(f"unknown record {kind!r}", lineno)
    if not inputs or not outputs:
        raise FormatError("spec needs non-empty inputs and outputs lines")
    try:
        return GateSpec(name, inputs, outputs, frozenset(rows))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def dumps_spec(spec: GateSpec) -> str:
    lines = [f"inputs {' '.join(spec.inputs)}", f"outputs {' '.join(spec.outputs)}"]
    for row in sorted(spec.relation):
        lines.append("row " + " ".join(f"{v:+d}" for v in row))
    return "\n".join(lines) + "\n"


# -- objectives ---------------------------------------------------------------------

@dataclass(frozen=True)
class ObjectiveVector:
    max_abs: int
    input_num: int
    quad_num: int
    priority: tuple = DEFAULT_PRIORITY

    def __post_init__(self):
        _check_priority(self.priority)

    def value(self, name) -> int:
        return {MAX_ABS: self.max_abs, INPUT_NUM: self.input_num, QUAD_NUM: self.quad_num}[name]

    def key(self) -> tuple:
        return tuple(self.value(n) for n in self.priority)

    def as_tuple(self) -> tuple:
        """(MAX_ABS, INPUT_NUM, QUAD_NUM) regardless of priority."""
        return (self.max_abs, self.input_num, self.quad_num)


def _check_priority(priority):
    if sorted(priority) != sorted(OBJECTIVES):
        raise ValueError(f"priority must be a permutation of {OBJECTIVES}, got {priority}")


def parse_priority(text: str) -> tuple:
    """``"MAX_ABS>QUAD_NUM>INPUT_NUM"`` or comma separated."""
    parts = tuple(p.strip().upper() for p in text.replace(">", ",").split(",") if p.strip())
    _check_priority(parts)
    return parts


def objectives_of(model: IsingModel, inputs, priority=DEFAULT_PRIORITY) -> ObjectiveVector:
    return ObjectiveVector(
        max_abs=model.max_abs(),
        input_num=sum(1 for v in inputs if model.get_linear(v) != 0),
        quad_num=len(model.quadratic),
        priority=tuple(priority),
    )


# -- constraint system --------------------------------------------------------------

@dataclass
class ConstraintGroup:
    """Constraints induced by one pin assignment.

    ``completions`` holds, for each ancilla completion, the sign pattern that
    multiplies the coefficient unknowns (so energy = pattern · coefficients).
    A consistent group demands ``min(energies) == mu`` (a disjunction of
    equalities) and ``energy >= mu`` for each completion; an inconsistent
    one demands ``energy >= mu + 1`` for each completion.
    """

    row: dict
    consistent: bool
    completions: list

    @property
    def n_equalities(self) -> int:
        return len(self.completions) if self.consistent else 0

    @property
    def n_lower_bounds(self) -> int:
        return len(self.completions)


@dataclass
class ConstraintSystem:
    spec: GateSpec
    ancillas: tuple
    variables: tuple
    terms: tuple                 # each a 1- or 2-tuple of variable names
    groups: list = field(default_factory=list)

    @property
    def n_unknowns(self) -> int:
        return len(self.terms)

    def counts(self) -> tuple:
        """(#equality groups, #inequality groups) for the ancilla-free reading."""
        eq = sum(1 for g in self.groups if g.consistent)
        return eq, len(self.groups) - eq

    def energies(self, coeffs) -> list:
        return [[int(np.dot(p, coeffs)) for p in g.completions] for g in self.groups]

    def ground_energy(self, coeffs):
        """mu implied by ``coeffs``: min over consistent groups, or None."""
        vals = [min(e) for g, e in zip(self.groups, self.energies(coeffs)) if g.consistent]
        return min(vals) if vals else None

    def is_satisfied(self, coeffs, mu) -> bool:
        for g, es in zip(self.groups, self.energies(coeffs)):
            if g.consistent:
                if min(es) != mu:
                    return False
            elif min(es) < mu + 1:
                return False
        return any(g.consistent for g in self.groups)


def ancilla_names(spec: GateSpec, count: int) -> tuple:
    used = set(spec.variables)
    names = [n for n in _ANCILLA_NAMES if n not in used]
    k = 0
    while len(names) < count:
        cand = f"anc{k}"
        k += 1
        if cand not in used:
            names.append(cand)
    return tuple(names[:count])


def _terms(variables):
    quad = tuple(itertools.combinations(variables, 2))
    lin = tuple((v,) for v in variables)
    return quad + lin


def _sign_matrix(n_vars, terms_idx):
    """Row r = assignment r in canonical order; column t = product of its spins."""
    spins = np.array(list(itertools.product((-1, 1), repeat=n_vars)), dtype=np.int8).reshape(-1, n_vars)
    cols = [np.prod(spins[:, list(t)], axis=1) for t in terms_idx]
    if not cols:
        return np.zeros((len(spins), 0), dtype=np.int8)
    return np.stack(cols, axis=1).astype(np.int8)


def build_constraints(spec: GateSpec, num_ancilla: int) -> ConstraintSystem:
    if num_ancilla < 0:
        raise SynthesisError("num_ancilla must be non-negative")
    n = len(spec.variables) + num_ancilla
    if n > MAX_VARIABLES:
        raise SynthesisError(f"{n} variables exceed the cap of {MAX_VARIABLES}")
    anc = ancilla_names(spec, num_ancilla)
    variables = spec.variables + anc
    terms = _terms(variables)
    pos = {v: i for i, v in enumerate(variables)}
    phi = _sign_matrix(n, [[pos[v] for v in t] for t in terms])
    per = 2 ** num_ancilla
    groups = []
    for r, (row, ok) in enumerate(spec.rows()):
        block = phi[r * per:(r + 1) * per]
        groups.append(ConstraintGroup(dict(zip(spec.variables, row)), ok,
                                      [list(map(int, p)) for p in block]))
    return ConstraintSystem(spec, anc, variables, terms, groups)


# -- results ------------------------------------------------------------------------

@dataclass
class SynthesisResult:
    model: IsingModel
    mu: int
    objectives: ObjectiveVector
    ancillas: list
    coefficients: tuple = ()

    @property
    def feasible(self) -> bool:
        return True


@dataclass
class InfeasibleWithinBound:
    bound: int

    @property
    def feasible(self) -> bool:
        return False


SynthesisOutcome = "SynthesisResult | InfeasibleWithinBound"


class _Problem:
    """Numeric view of a synthesis instance shared by both search strategies."""

    def __init__(self, spec: GateSpec, num_ancilla: int, bound: int, priority):
        if bound < 1:
            raise SynthesisError("bound must be at least 1")
        self.system = build_constraints(spec, num_ancilla)
        self.spec = spec
        self.bound = bound
        self.priority = tuple(priority)
        _check_priority(self.priority)
        self.variables = self.system.variables
        self.terms = self.system.terms
        self.k = len(self.terms)
        self.n_pin = len(spec.variables)
        self.n_anc = num_ancilla
        pos = {v: i for i, v in enumerate(self.variables)}
        self.term_idx = [[pos[v] for v in t] for t in self.terms]
        self.quad_mask = np.array([len(t) == 2 for t in self.terms])
        self.input_mask = np.array([len(t) == 1 and t[0] in spec.inputs for t in self.terms])
        self.consistent = np.array([ok for _, ok in spec.rows()])
        if not self.consistent.any():
            self.empty = True
        else:
            self.empty = False

    def objective_keys(self, C: np.ndarray) -> np.ndarray:
        """Pack the prioritised objective triple of each row of C into one int64."""
        vals = {
            MAX_ABS: np.abs(C).max(axis=1) if C.shape[1] else np.zeros(len(C), np.int64),
            INPUT_NUM: (C[:, self.input_mask] != 0).sum(axis=1),
            QUAD_NUM: (C[:, self.quad_mask] != 0).sum(axis=1),
        }
        a, b, c = (vals[n].astype(np.int64) for n in self.priority)
        return (a << 20) | (b << 10) | c

    def result(self, coeffs) -> SynthesisResult:
        coeffs = tuple(int(c) for c in coeffs)
        linear, quadratic = {}, {}
        for t, c in zip(self.terms, coeffs):
            if len(t) == 1:
                linear[t[0]] = c
            else:
                quadratic[t] = c
        model = IsingModel(linear, quadratic, 0, self.variables)
        mu = self.system.ground_energy(coeffs)
        obj = objectives_of(model, self.spec.inputs, self.priority)
        return SynthesisResult(model, int(mu), obj, list(self.system.ancillas), coeffs)


def _digits(start, count, base, width, offset):
    """Mixed-radix vectors for indices [start, start+count); first digit most significant."""
    idx = np.arange(start, start + count, dtype=np.int64)
    out = np.empty((count, width), dtype=np.int8)
    for col in range(width - 1, -1, -1):
        out[:, col] = idx % base - offset
        idx //= base
    return out


def _row_minima(E, n_anc):
    if n_anc:
        E = E.reshape(E.shape[0], -1, 2 ** n_anc).min(axis=2)
    return E


def _feasible_mask(Emin, consistent):
    """Rows of Emin (vectors x pin rows) satisfying the gap-1 penalty constraints."""
    cons = Emin[:, consistent]
    mu = cons.min(axis=1)
    ok = (cons == mu[:, None]).all(axis=1)
    if (~consistent).any():
        ok &= (Emin[:, ~consistent] >= (mu + 1)[:, None]).all(axis=1)
    return ok, mu


def _update_best(best, keys, C):
    """Keep the (key, vector) lexicographic minimum."""
    if not len(keys):
        return best
    kmin = keys.min()
    tied = C[keys == kmin]
    order = np.lexsort(tied.T[::-1])
    cand = tuple(int(x) for x in tied[order[0]])
    if best is None or (int(kmin), cand) < best:
        return (int(kmin), cand)
    return best


def _synthesize_exhaustive(p: _Problem):
    base = 2 * p.bound + 1
    total = base ** p.k
    if total > EXHAUSTIVE_LIMIT:
        raise SynthesisError(
            f"{total} coefficient vectors exceed the exhaustive limit; use strategy='split'")
    phi = _sign_matrix(len(p.variables), p.term_idx).astype(np.float32)
    best = None
    for start in range(0, total, _CHUNK):
        C = _digits(start, min(_CHUNK, total - start), base, p.k, p.bound)
        # consistent rows first: most vectors already fail the equalities there
        E = np.rint(C.astype(np.float32) @ phi.T).astype(np.int32)
        Emin = _row_minima(E, p.n_anc)
        ok, _ = _feasible_mask(Emin, p.consistent)
        if ok.any():
            best = _update_best(best, p.objective_keys(C[ok]), C[ok])
    return best


def _synthesize_split(p: _Problem):
    """Join pin-only terms with ancilla-touching terms on consistent-row energies.

    Energy splits as E(pins, anc) = E0(pins) + Ea(pins, anc) where E0 uses only
    terms among pins.  With A(pins) = min_anc Ea, feasibility needs
    E0 + A constant on consistent rows, so the two halves can be enumerated
    separately and matched on the differences of their consistent-row values.
    Every pair of halves is still accounted for, so the search stays exhaustive.
    """
    base = 2 * p.bound + 1
    pin_set = set(range(p.n_pin))
    main_cols = [i for i, t in enumerate(p.term_idx) if set(t) <= pin_set]
    anc_cols = [i for i, t in enumerate(p.term_idx) if not set(t) <= pin_set]
    n_rows = 2 ** p.n_pin
    per = 2 ** p.n_anc

    phi_full = _sign_matrix(len(p.variables), p.term_idx)
    # main terms are constant across ancilla completions; sample completion 0
    phi_main = phi_full[::per][:, main_cols].astype(np.float32)
    phi_anc = phi_full[:, anc_cols].astype(np.float32)

    n_anc_vec = base ** len(anc_cols)
    if n_anc_vec > EXHAUSTIVE_LIMIT // 8:
        raise SynthesisError("ancilla half of the search is too large")
    CA = _digits(0, n_anc_vec, base, len(anc_cols), p.bound)
    A = _row_minima(np.rint(CA.astype(np.float32) @ phi_anc.T).astype(np.int32), p.n_anc)

    cons = np.nonzero(p.consistent)[0]
    ref = cons[0]
    rng = np.random.default_rng(0x5EED)
    weights = rng.integers(1, 2 ** 62, size=len(cons), dtype=np.int64) | 1

    def hashes(D):
        return (D.astype(np.int64) * weights).sum(axis=1)

    # main diff must equal -(anc diff)
    a_hash = hashes(-(A[:, cons] - A[:, [ref]]))
    a_order = np.argsort(a_hash, kind="stable")
    a_sorted = a_hash[a_order]

    total = base ** len(main_cols)
    best = None
    for start in range(0, total, _CHUNK):
        CM = _digits(start, min(_CHUNK, total - start), base, len(main_cols), p.bound)
        E0 = np.rint(CM.astype(np.float32) @ phi_main.T).astype(np.int32)
        h = hashes(E0[:, cons] - E0[:, [ref]])
        lo = np.searchsorted(a_sorted, h, side="left")
        hi = np.searchsorted(a_sorted, h, side="right")
        counts = hi - lo
        if not counts.any():
            continue
        mi = np.repeat(np.arange(len(CM)), counts)
        offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        ai = a_order[np.repeat(lo, counts) + offs]
        Emin = E0[mi] + A[ai]
        ok, _ = _feasible_mask(Emin, p.consistent)
        if not ok.any():
            continue
        mi, ai = mi[ok], ai[ok]
        C = np.empty((len(mi), p.k), dtype=np.int8)
        C[:, main_cols] = CM[mi]
        C[:, anc_cols] = CA[ai]
        best = _update_best(best, p.objective_keys(C), C)
    return best


STRATEGIES = ("auto", "exhaustive", "split")


def synthesize(spec: GateSpec, num_ancilla: int = 0, bound: int = 1,
               priority=DEFAULT_PRIORITY, strategy: str = "auto"):
    """Lexicographically optimal penalty model, or ``InfeasibleWithinBound``.

    ``strategy='exhaustive'`` walks the full hypercube in canonical order;
    ``'split'`` performs the same search as a join of the pin-only and
    ancilla halves (much faster when ancillas are present).  Both return the
    same objectives and, by the shared tie-break, the same model.
    """
    if strategy not in STRATEGIES:
        raise SynthesisError(f"unknown strategy {strategy!r}")
    p = _Problem(spec, num_ancilla, bound, priority)
    if p.empty:
        return InfeasibleWithinBound(bound)
    if strategy == "auto":
        strategy = "split" if num_ancilla else "exhaustive"
        if strategy == "exhaustive" and (2 * bound + 1) ** p.k > EXHAUSTIVE_LIMIT:
            strategy = "split"
    best = _synthesize_exhaustive(p) if strategy == "exhaustive" else _synthesize_split(p)
    if best is None:
        return InfeasibleWithinBound(bound)
    return p.result(best[1])


# -- verification -------------------------------------------------------------------

@dataclass
class VerificationReport:
    passed: bool
    mu: int
    gap: int | None
    failures: list
    objectives: ObjectiveVector
    ancillas: list

    def __bool__(self):
        return self.passed


def verify_gate_model(model: IsingModel, spec: GateSpec,
                      priority=DEFAULT_PRIORITY) -> VerificationReport:
    """Brute-force check that ``model`` is a gap-1 penalty model of ``spec``.

    Variables of ``model`` outside the spec are treated as ancillas.  ``gap``
    is the lowest inconsistent-row energy minus ``mu``.
    """
    for v in spec.variables:
        if v not in model:
            raise UnknownVariableError(f"spec variable {v!r} absent from model")
    anc = [v for v in model.variables if v not in spec.variables]
    order = list(spec.variables) + anc
    spins = np.array(list(itertools.product((-1, 1), repeat=len(order))), dtype=np.int64)
    spins = spins.reshape(-1, len(order))
    pos = {v: i for i, v in enumerate(order)}
    E = np.full(len(spins), model.offset, dtype=np.int64)
    for v, c in model.linear.items():
        E += c * spins[:, pos[v]]
    for (u, v), c in model.quadratic.items():
        E += c * spins[:, pos[u]] * spins[:, pos[v]]
    Emin = E.reshape(-1, 2 ** len(anc)).min(axis=1)
    mu = int(Emin.min())
    failures = []
    inc_min = None
    for (row, ok), e in zip(spec.rows(), Emin.tolist()):
        assignment = dict(zip(spec.variables, row))
        if ok and e != mu:
            failures.append({"row": assignment, "consistent": True, "energy": e,
                             "reason": f"consistent row minimum {e} != mu {mu}"})
        if not ok:
            inc_min = e if inc_min is None else min(inc_min, e)
            if e < mu + 1:
                failures.append({"row": assignment, "consistent": False, "energy": e,
                                 "reason": f"inconsistent row reaches {e} < mu + 1"})
    if not spec.relation:
        failures.append({"row": None, "consistent": False, "energy": mu,
                         "reason": "relation is empty"})
    gap = None if inc_min is None else inc_min - mu
    return VerificationReport(not failures, mu, gap, failures,
                              objectives_of(model, spec.inputs, priority), anc)


def hypercube_size(spec: GateSpec, num_ancilla: int, bound: int) -> int:
    n = len(spec.variables) + num_ancilla
    return (2 * bound + 1) ** (math.comb(n, 2) + n)
