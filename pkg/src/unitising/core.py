"""Integer Ising models, energy evaluation and exhaustive ground-state search.

An :class:`IsingModel` is an immutable bag of integer coefficients over named
spin variables.  Variables are kept in lexicographic order so that every
iteration over a model (enumeration, serialization, ground-state listings) is
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    FormatError,
    MissingVariableError,
    TooManyFreeVariablesError,
    UnknownVariableError,
)

Spin = int
SpinAssignment = dict  # variable name -> -1 | +1

DEFAULT_FREE_LIMIT = 24
_CHUNK_BITS = 18


def _pair(u, v):
    return (u, v) if u <= v else (v, u)


def check_spin(value, name="spin"):
    if value not in (-1, 1) or isinstance(value, bool):
        raise ValueError(f"{name} must be -1 or +1, got {value!r}")
    return int(value)


class QuadraticForm:
    """Integer quadratic polynomial over named variables (domain-agnostic).

    ``quadratic`` keys are pairs of distinct names, stored with the smaller
    name first.  Zero coefficients are dropped on construction, duplicate
    pairs (in either orientation) are summed.
    """

    __slots__ = ("_variables", "_linear", "_quadratic", "_offset", "_index")

    def __init__(self, linear=None, quadratic=None, offset=0, variables=()):
        lin: dict[str, int] = {}
        quad: dict[tuple[str, str], int] = {}
        names = set(variables)
        for v, c in (linear or {}).items():
            _check_name(v)
            names.add(v)
            lin[v] = lin.get(v, 0) + _as_int(c)
        for key, c in (quadratic or {}).items():
            u, v = key
            _check_name(u)
            _check_name(v)
            if u == v:
                raise ValueError(f"self-pair ({u}, {v}) in quadratic terms")
            names.update((u, v))
            p = _pair(u, v)
            quad[p] = quad.get(p, 0) + _as_int(c)
        for v in names:
            _check_name(v)
        self._variables = tuple(sorted(names))
        self._index = {v: i for i, v in enumerate(self._variables)}
        self._linear = MappingProxyType({v: lin[v] for v in sorted(lin) if lin[v]})
        self._quadratic = MappingProxyType({p: quad[p] for p in sorted(quad) if quad[p]})
        self._offset = _as_int(offset)

    @property
    def variables(self) -> tuple:
        return self._variables

    @property
    def linear(self) -> Mapping[str, int]:
        return self._linear

    @property
    def quadratic(self) -> Mapping[tuple, int]:
        return self._quadratic

    @property
    def offset(self) -> int:
        return self._offset

    def __len__(self):
        return len(self._variables)

    def __contains__(self, v):
        return v in self._index

    def index(self, v) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise UnknownVariableError(f"unknown variable {v!r}") from None

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return (
            self._variables == other._variables
            and dict(self._linear) == dict(other._linear)
            and dict(self._quadratic) == dict(other._quadratic)
            and self._offset == other._offset
        )

    def __hash__(self):
        return hash((type(self).__name__, self._variables, tuple(self._linear.items()),
                     tuple(self._quadratic.items()), self._offset))

    def __repr__(self):
        return f"{type(self).__name__}({format_polynomial(self)!r}, variables={list(self._variables)})"

    def get_linear(self, v) -> int:
        return self._linear.get(v, 0)

    def get_quadratic(self, u, v) -> int:
        return self._quadratic.get(_pair(u, v), 0)

    def neighbors(self, v) -> dict:
        """Map each variable coupled to ``v`` onto the coupling coefficient."""
        out = {}
        for (a, b), c in self._quadratic.items():
            if a == v:
                out[b] = c
            elif b == v:
                out[a] = c
        return out

    def coefficients(self):
        yield from self._quadratic.values()
        yield from self._linear.values()

    def max_abs(self) -> int:
        return max((abs(c) for c in self.coefficients()), default=0)

    def is_unit(self) -> bool:
        """True iff every stored coefficient (offset excluded) is -1 or +1."""
        return all(c in (-1, 1) for c in self.coefficients())

    def replace(self, linear=None, quadratic=None, offset=None, variables=None):
        return type(self)(
            self._linear if linear is None else linear,
            self._quadratic if quadratic is None else quadratic,
            self._offset if offset is None else offset,
            self._variables if variables is None else variables,
        )

    def with_offset(self, offset):
        return self.replace(offset=offset)

    def relabel(self, mapping):
        """Rename variables; names absent from ``mapping`` are kept."""
        m = lambda v: mapping.get(v, v)  # noqa: E731
        new_vars = [m(v) for v in self._variables]
        if len(set(new_vars)) != len(new_vars):
            raise ValueError("relabelling is not injective")
        return type(self)(
            {m(v): c for v, c in self._linear.items()},
            {(m(u), m(v)): c for (u, v), c in self._quadratic.items()},
            self._offset,
            new_vars,
        )


class IsingModel(QuadraticForm):
    """H(s) = offset + sum_i h_i s_i + sum_{i<j} J_ij s_i s_j over spins in {-1, +1}."""

    __slots__ = ()

    def energy(self, s) -> int:
        return energy(self, s)


class QuboModel(QuadraticForm):
    """E(x) = offset + sum_i W_i x_i + sum_{i<j} W_ij x_i x_j over bits in {0, 1}."""

    __slots__ = ()

    def energy(self, x) -> int:
        for v, val in x.items():
            if v not in self:
                raise UnknownVariableError(f"unknown variable {v!r}")
            if val not in (0, 1) or isinstance(val, bool):
                raise ValueError(f"{v} must be 0 or 1, got {val!r}")
        missing = [v for v in self.variables if v not in x]
        if missing:
            raise MissingVariableError(f"assignment is missing {', '.join(missing)}")
        e = self.offset
        for v, c in self.linear.items():
            e += c * x[v]
        for (u, v), c in self.quadratic.items():
            e += c * x[u] * x[v]
        return e


def _check_name(v):
    if not isinstance(v, str) or not v or any(ch.isspace() for ch in v):
        raise ValueError(f"variable names must be non-empty strings without whitespace: {v!r}")


def _as_int(c):
    if isinstance(c, bool):
        raise TypeError("boolean coefficient")
    if isinstance(c, (int, np.integer)):
        return int(c)
    if isinstance(c, float) and c.is_integer():
        return int(c)
    raise TypeError(f"coefficients must be integers, got {c!r}")


def format_polynomial(model: QuadraticForm) -> str:
    """Human-readable form, e.g. ``ab - 2ax - 2bx - a - b + 2x``."""
    terms = []
    for (u, v), c in model.quadratic.items():
        terms.append((c, f"{u}*{v}" if len(u) > 1 or len(v) > 1 else u + v))
    for v, c in model.linear.items():
        terms.append((c, v))
    if model.offset:
        terms.append((model.offset, ""))
    if not terms:
        return "0"
    out = []
    for k, (c, name) in enumerate(terms):
        mag = abs(c)
        body = name if (mag == 1 and name) else f"{mag}{name}"
        sign = "-" if c < 0 else "+"
        out.append((sign if c < 0 else "") + body if k == 0 else f"{sign} {body}")
    return " ".join(out)


# -- energy ---------------------------------------------------------------------

def _validate_assignment(model: IsingModel, s: Mapping, *, complete: bool):
    for v, val in s.items():
        if v not in model:
            raise UnknownVariableError(f"unknown variable {v!r}")
        check_spin(val, v)
    if complete:
        missing = [v for v in model.variables if v not in s]
        if missing:
            raise MissingVariableError(f"assignment is missing {', '.join(missing)}")


def energy(model: IsingModel, s: Mapping) -> int:
    _validate_assignment(model, s, complete=True)
    e = model.offset
    for v, c in model.linear.items():
        e += c * s[v]
    for (u, v), c in model.quadratic.items():
        e += c * s[u] * s[v]
    return e


# -- exhaustive enumeration ---------------------------------------------------------

@dataclass
class GroundStateReport:
    min_energy: int
    ground_states: list = field(default_factory=list)
    gap: int | None = None

    @property
    def degeneracy(self) -> int:
        return len(self.ground_states)

    def project(self, names) -> list:
        """Distinct restrictions of the ground states to ``names``, in order."""
        seen = {}
        for gs in self.ground_states:
            key = tuple(gs[n] for n in names)
            seen.setdefault(key, None)
        return [dict(zip(names, k)) for k in seen]


def reduce_clamps(model: IsingModel, clamps: Mapping | None):
    """Fold clamped spins into a constant and effective biases of free spins.

    Returns ``(free, const, h, edges)`` where ``free`` is the ordered list of
    unclamped variables, ``h`` their effective linear coefficients and
    ``edges`` a list of ``(i, j, J)`` between free positions.
    """
    clamps = dict(clamps or {})
    _validate_assignment(model, clamps, complete=False)
    free = [v for v in model.variables if v not in clamps]
    pos = {v: i for i, v in enumerate(free)}
    const = model.offset
    h = [0] * len(free)
    for v, c in model.linear.items():
        if v in clamps:
            const += c * clamps[v]
        else:
            h[pos[v]] += c
    edges = []
    for (u, v), c in model.quadratic.items():
        cu, cv = u in clamps, v in clamps
        if cu and cv:
            const += c * clamps[u] * clamps[v]
        elif cu:
            h[pos[v]] += c * clamps[u]
        elif cv:
            h[pos[u]] += c * clamps[v]
        else:
            edges.append((pos[u], pos[v], c))
    return free, const, h, edges


def _spin_block(start, count, nfree):
    """Spins for enumeration indices [start, start+count); variable 0 is the MSB."""
    idx = np.arange(start, start + count, dtype=np.int64)
    shifts = np.arange(nfree - 1, -1, -1, dtype=np.int64)
    bits = (idx[:, None] >> shifts[None, :]) & 1
    return (2 * bits - 1).astype(np.int64)


def enumerate_ground_states(model: IsingModel, clamps: Mapping | None = None,
                            free_limit: int = DEFAULT_FREE_LIMIT) -> GroundStateReport:
    """Evaluate every completion of ``clamps`` and return the exact spectrum bottom.

    Completions are visited in canonical order (variables sorted by name,
    -1 before +1, first variable most significant), so ``ground_states`` is
    deterministic.  ``gap`` is the second-lowest distinct energy minus the
    minimum, or ``None`` when every completion has the same energy.
    """
    clamps = dict(clamps or {})
    free, const, h, edges = reduce_clamps(model, clamps)
    n = len(free)
    if n > free_limit:
        raise TooManyFreeVariablesError(n, free_limit)
    h_arr = np.asarray(h, dtype=np.int64)
    ei = np.asarray([e[0] for e in edges], dtype=np.int64)
    ej = np.asarray([e[1] for e in edges], dtype=np.int64)
    ec = np.asarray([e[2] for e in edges], dtype=np.int64)

    total = 1 << n
    chunk = 1 << min(n, _CHUNK_BITS)
    best = None
    second = None
    hits: list[np.ndarray] = []
    for start in range(0, total, chunk):
        S = _spin_block(start, chunk, n)
        E = const + S @ h_arr
        if len(ec):
            E = E + (S[:, ei] * S[:, ej]) @ ec
        lo = int(E.min())
        if best is None or lo < best:
            if best is not None:
                second = best if second is None else min(second, best)
            best = lo
            hits = []
        above = E[E > best]
        if above.size:
            m = int(above.min())
            second = m if second is None else min(second, m)
        if lo == best:
            hits.append(np.nonzero(E == best)[0] + start)

    ground = []
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    for block in hits:
        spins = 2 * ((block[:, None] >> shifts[None, :]) & 1) - 1
        for row in spins.tolist():
            gs = dict(clamps)
            gs.update(zip(free, row))
            ground.append({v: gs[v] for v in model.variables})
    gap = None if second is None else second - best
    return GroundStateReport(int(best), ground, gap)


def brute_force_spectrum(model: IsingModel) -> dict:
    """Energy of every assignment keyed by the spin tuple in variable order.

    Deliberately naive (pure Python re-evaluation); used as a test oracle.
    """
    from itertools import product

    out = {}
    for spins in product((-1, 1), repeat=len(model.variables)):
        out[spins] = energy(model, dict(zip(model.variables, spins)))
    return out


# -- textual format -----------------------------------------------------------------

def dumps_model(model: QuadraticForm) -> str:
    """Canonical text: vars, then lin, then quad, then offset.

    QUBO models get a leading ``format qubo`` line; Ising models carry no
    header so the common case stays minimal.
    """
    lines = ["format qubo"] if isinstance(model, QuboModel) else []
    lines += [f"var {v}" for v in model.variables]
    lines += [f"lin {v} {c}" for v, c in model.linear.items()]
    lines += [f"quad {u} {v} {c}" for (u, v), c in model.quadratic.items()]
    lines.append(f"offset {model.offset}")
    return "\n".join(lines) + "\n"


def _parse_int(tok, lineno):
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"expected an integer, got {tok!r}", lineno) from None


def iter_records(text: str) -> Iterable[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def loads_model(text: str) -> QuadraticForm:
    """Parse the ``var/lin/quad/offset`` format produced by :func:`dumps_model`.

    Every name must be declared with ``var`` before it is used; repeated
    declarations of the same term are rejected rather than summed.  A
    ``format qubo`` header (first record only) yields a :class:`QuboModel`.
    """
    cls = IsingModel
    seen_records = False
    variables: list[str] = []
    declared: set[str] = set()
    linear: dict = {}
    quadratic: dict = {}
    offset = None
    for lineno, tok in iter_records(text):
        kind = tok[0]
        if kind == "format":
            if seen_records or len(tok) != 2 or tok[1] not in ("ising", "qubo"):
                raise FormatError(f"bad format header {' '.join(tok)!r}", lineno)
            cls = QuboModel if tok[1] == "qubo" else IsingModel
            seen_records = True
            continue
        seen_records = True
        if kind == "var":
            if len(tok) != 2:
                raise FormatError("usage: var <name>", lineno)
            if tok[1] in declared:
                raise FormatError(f"duplicate declaration of {tok[1]!r}", lineno)
            try:
                _check_name(tok[1])
            except ValueError as exc:
                raise FormatError(str(exc), lineno) from None
            declared.add(tok[1])
            variables.append(tok[1])
        elif kind == "lin":
            if len(tok) != 3:
                raise FormatError("usage: lin <name> <int>", lineno)
            v = tok[1]
            if v not in declared:
                raise FormatError(f"unknown variable {v!r}", lineno)
            if v in linear:
                raise FormatError(f"duplicate linear term for {v!r}", lineno)
            linear[v] = _parse_int(tok[2], lineno)
        elif kind == "quad":
            if len(tok) != 4:
                raise FormatError("usage: quad <name> <name> <int>", lineno)
            u, v = tok[1], tok[2]
            for name in (u, v):
                if name not in declared:
                    raise FormatError(f"unknown variable {name!r}", lineno)
            if u == v:
                raise FormatError(f"self-pair {u!r}", lineno)
            p = _pair(u, v)
            if p in quadratic:
                raise FormatError(f"duplicate quadratic term for {u!r}, {v!r}", lineno)
            quadratic[p] = _parse_int(tok[3], lineno)
        elif kind == "offset":
            if len(tok) != 2:
                raise FormatError("usage: offset <int>", lineno)
            if offset is not None:
                raise FormatError("duplicate offset", lineno)
            offset = _parse_int(tok[1], lineno)
        else:
            raise FormatError(f"unknown record {kind!r}", lineno)
    return cls(linear, quadratic, offset or 0, variables)
