"""Unit Ising penalty models for logic gates, circuit compilation and factoring."""

from .anneal import AnnealResult, AnnealSchedule, anneal
from .circuit import (SELECTOR, Circuit, GateInstance, Pin, dumps_netlist, evaluate_circuit,
                      parse_netlist, truth_table)
from .compile import (BRUTE, EXACT, CompiledModel, backward_simulate, compile_circuit,
                      forward_simulate)
from .core import (GroundStateReport, IsingModel, QuboModel, dumps_model, energy,
                   enumerate_ground_states, loads_model)
from .errors import (CircuitError, CompileError, FormatError, MergeError, MissingVariableError,
                     SolverFailure, SynthesisError, TooManyFreeVariablesError, UnitIsingError,
                     UnknownVariableError, UnsatisfiableError)
from .exact import solve_exact
from .gate_synth import (DEFAULT_PRIORITY, INPUT_NUM, MAX_ABS, QUAD_FIRST, QUAD_NUM, GateSpec,
                         InfeasibleWithinBound, ObjectiveVector, SynthesisResult,
                         build_constraints, builtin_spec, synthesize, verify_gate_model)
from .library import GateLibrary, published_model
from .multiplier import (MultiplierSpec, MultiplierStats, build_multiplier, compile_multiplier,
                         factor, model_stats, multiply)
from .transforms import (ising_to_qubo, merge_nodes, negate_variable, qubo_to_ising)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
