"""Gate penalty models used by the circuit compiler.

The defaults are the published unit and non-unit models for AND, OR, XOR,
half and full adders.  XNOR, NAND and NOR are derived by negating the output
of XOR, AND and OR.
"""

from __future__ import annotations

from .core import IsingModel
from .errors import CompileError
from .gate_synth import SynthesisResult, builtin_spec, objectives_of, verify_gate_model
from .transforms import negate_variable

VARIANTS = ("plain", "u", "zu")


def _model(text: str) -> IsingModel:
    """Parse ``"ab -2ax +x"``-style shorthand: single-letter variables only."""
    linear, quadratic = {}, {}
    for tok in text.split():
        sign = -1 if tok[0] == "-" else 1
        body = tok.lstrip("+-")
        digits = ""
        while body and body[0].isdigit():
            digits += body[0]
            body = body[1:]
        c = sign * int(digits or 1)
        if len(body) == 2:
            quadratic[(body[0], body[1])] = c
        else:
            linear[body] = c
    return IsingModel(linear, quadratic)


# (kind, variant) -> (model text, mu); single-letter pins as in the gate specs
PUBLISHED_MODELS = {
    ("AND", "plain"): ("ab -2ax -2bx -a -b +2x", -3),
    ("AND", "u"): ("-au -ax +bu -bx -b -u +x", -3),
    ("AND", "zu"): ("ab +au -ax +bu -bx +u +x", -3),
    ("OR", "plain"): ("ab -2ax -2bx +a +b -2x", -3),
    ("OR", "u"): ("-au -ax +bu -bx +b +u -x", -3),
    ("OR", "zu"): ("ab +au -ax +bu -bx -u -x", -3),
    ("XOR", "plain"): ("-ab +2au +ax -2bu -bx +2ux -a +b -2u -x", -4),
    ("XOR", "zu"): ("-ab -au -av +bu +bv +ux -vx -u +v -x", -4),
    ("HA", "plain"): ("2cs -2cx -2cy -sx -sy +xy +2c +s -x -y", -4),
    ("HA", "zu"): ("cs -cx -cy +su +ux +uy +xy +c +s +u", -4),
    ("FA", "plain"): ("2cs -2cx -2cy -2cz -sx -sy -sz +xy +xz +yz", -4),
    ("FA", "zu"): ("cs -cx -cy -cz -su -sy -ux +uy -uz +xz", -4),
}

_DERIVED = {"XNOR": "XOR", "NAND": "AND", "NOR": "OR"}


def published_model(kind: str, variant: str) -> tuple:
    text, mu = PUBLISHED_MODELS[(kind, variant)]
    return _model(text), mu


def _result(kind, model, mu):
    spec = builtin_spec(kind)
    anc = [v for v in model.variables if v not in spec.variables]
    return SynthesisResult(model, mu, objectives_of(model, spec.inputs), anc)


class GateLibrary:
    """Mapping ``(kind, variant) -> SynthesisResult``; entries are verified on insert."""

    def __init__(self, entries=None, verify=True):
        self._entries = {}
        for key, res in (entries or {}).items():
            self.register(*key, res, verify=verify)

    def register(self, kind, variant, result: SynthesisResult, verify=True):
        if verify:
            report = verify_gate_model(result.model, builtin_spec(kind))
            if not report.passed or report.mu != result.mu:
                raise CompileError(
                    f"{kind}/{variant} is not a penalty model of {kind}: "
                    f"{[f['reason'] for f in report.failures] or 'mu mismatch'}")
        self._entries[(kind, variant)] = result

    def get(self, kind, variant) -> SynthesisResult:
        try:
            return self._entries[(kind, variant)]
        except KeyError:
            raise CompileError(f"library has no {variant!r} model for {kind}") from None

    def __contains__(self, key):
        return key in self._entries

    def __iter__(self):
        return iter(sorted(self._entries))

    def items(self):
        return [(k, self._entries[k]) for k in self]

    @classmethod
    def default(cls) -> "GateLibrary":
        lib = cls()
        for (kind, variant), (text, mu) in PUBLISHED_MODELS.items():
            lib.register(kind, variant, _result(kind, _model(text), mu))
        # XOR, HA and FA zero-input models are already unit
        for kind in ("XOR", "HA", "FA"):
            lib.register(kind, "u", lib.get(kind, "zu"))
        for kind, base in _DERIVED.items():
            for variant in VARIANTS:
                src = lib.get(base, variant)
                lib.register(kind, variant, _result(kind, negate_variable(src.model, "x"), src.mu))
        return lib
