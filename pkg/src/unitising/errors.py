"""Exception hierarchy shared by every module of the package."""


class UnitIsingError(Exception):
    """Base class for all domain errors raised by this package."""


class UnknownVariableError(UnitIsingError, KeyError):
    def __str__(self):
        return self.args[0] if self.args else "unknown variable"


class MissingVariableError(UnitIsingError, KeyError):
    def __str__(self):
        return self.args[0] if self.args else "missing variable"


class TooManyFreeVariablesError(UnitIsingError):
    """Exact enumeration refused; ``count`` is the number of free spins."""

    def __init__(self, count, limit):
        super().__init__(f"{count} free variables exceed the limit of {limit}")
        self.count = count
        self.limit = limit


class FormatError(UnitIsingError, ValueError):
    """Malformed textual input. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SynthesisError(UnitIsingError, ValueError):
    pass


class MergeError(UnitIsingError, ValueError):
    pass


class CircuitError(UnitIsingError, ValueError):
    """Invalid netlist. ``gate`` is the index of the offending gate when known."""

    def __init__(self, message, gate=None):
        super().__init__(message)
        self.gate = gate


class CompileError(UnitIsingError, ValueError):
    pass


class SolverFailure(UnitIsingError, RuntimeError):
    """The annealer did not certify a ground state."""


class UnsatisfiableError(UnitIsingError, ValueError):
    """Clamped values admit no consistent assignment."""
