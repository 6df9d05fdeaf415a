"""Exact quantum circuit simulation over bit-sliced BDD state vectors."""

from .algebra import AlgebraicAmplitude, RootTwoRational
from .bdd import BddError, Engine, NodeBudgetExceeded
from .circuit import (Circuit, Gate, GateKind, ParseError, gate, gen_bv,
                      gen_ghz, gen_random, parse, serialize)
from .gates import SimulationTimeout, apply_circuit, apply_gate, ripple_add, run_circuit
from .measure import Hyperfunction, MeasurementError, build_hyperfunction
from .oracle import DenseState, compare, simulate_dense
from .state import SlicedState, init_basis_state

__version__ = "0.1.0"

__all__ = [
    "AlgebraicAmplitude",
    "BddError",
    "Circuit",
    "DenseState",
    "Engine",
    "Gate",
    "GateKind",
    "Hyperfunction",
    "MeasurementError",
    "NodeBudgetExceeded",
    "ParseError",
    "RootTwoRational",
    "SimulationTimeout",
    "SlicedState",
    "apply_circuit",
    "apply_gate",
    "build_hyperfunction",
    "compare",
    "gate",
    "gen_bv",
    "gen_ghz",
    "gen_random",
    "init_basis_state",
    "parse",
    "ripple_add",
    "run_circuit",
    "serialize",
    "simulate_dense",
]
