"""Timelike quantum energy teleportation on a lattice Nambu-Jona-Lasinio model."""

from ._kernels import BACKEND
from .pauli import PauliString, PauliSum, commutes, multiply, simplify, to_dense_matrix
from .protocol import EnergyReport, ProtocolConfig, perturbative_delta_eb, run_protocol
from .statevector import StateVector, apply_gate, expectation, measure_qubit

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "PauliString", "PauliSum", "commutes", "multiply", "simplify",
    "to_dense_matrix", "EnergyReport", "ProtocolConfig", "perturbative_delta_eb",
    "run_protocol", "StateVector", "apply_gate", "expectation", "measure_qubit",
]
