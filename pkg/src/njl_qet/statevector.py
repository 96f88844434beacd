"""Dense state-vector engine.

Qubit 0 is the least significant bit of the amplitude index.  Gate
application mutates the amplitude buffer in place and returns the same
``StateVector``; call :meth:`StateVector.copy` first when the input must
survive.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import _kernels
from .errors import (DimensionError, NonHermitianError, NonUnitaryError,
                     ZeroProbabilityError)
from .pauli import PauliString, PauliSum

NORM_TOL = 1e-10
FORCED_PROB_FLOOR = 1e-14


class StateVector:
    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, amplitudes, num_qubits: Optional[int] = None):
        amps = np.ascontiguousarray(amplitudes, dtype=np.complex128)
        if amps.ndim != 1:
            raise DimensionError("amplitudes must be one-dimensional")
        n = amps.shape[0].bit_length() - 1
        if amps.shape[0] != 1 << n:
            raise DimensionError(f"length {amps.shape[0]} is not a power of two")
        if num_qubits is not None and num_qubits != n:
            raise DimensionError(f"length {amps.shape[0]} != 2**{num_qubits}")
        self.num_qubits = n
        self.amplitudes = amps

    @classmethod
    def zero_state(cls, num_qubits: int) -> "StateVector":
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(amps)

    @classmethod
    def basis_state(cls, num_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps)

    @classmethod
    def from_bits(cls, bits: str) -> "StateVector":
        """``bits[q]`` is the value of qubit ``q``."""
        return cls.basis_state(len(bits), sum(int(b) << q for q, b in enumerate(bits)))

    @classmethod
    def random(cls, num_qubits: int, rng) -> "StateVector":
        dim = 1 << num_qubits
        amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        return cls(amps / np.linalg.norm(amps))

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "StateVector":
        self.amplitudes /= self.norm()
        return self

    def dump(self, path) -> None:
        """Raw little-endian (re, im) float64 pairs in index order."""
        self.amplitudes.astype("<c16").tofile(path)

    @classmethod
    def load(cls, path) -> "StateVector":
        return cls(np.fromfile(path, dtype="<c16"))

    def __repr__(self):
        return f"StateVector(num_qubits={self.num_qubits})"


# ------------------------------------------------------------------ gates ---


@dataclass(frozen=True)
class SingleQubitGate:
    matrix: np.ndarray
    target: int
    label: str = "u"

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (2, 2):
            raise NonUnitaryError("single-qubit gate must be 2x2")
        if not np.allclose(m.conj().T @ m, np.eye(2), atol=1e-12, rtol=0):
            raise NonUnitaryError(f"gate {self.label} is not unitary")
        object.__setattr__(self, "matrix", m)

    def inverse(self) -> "SingleQubitGate":
        return SingleQubitGate(self.matrix.conj().T, self.target, self.label + "_dg")


@dataclass(frozen=True)
class CXGate:
    control: int
    target: int

    def inverse(self) -> "CXGate":
        return self


@dataclass(frozen=True)
class PauliRotation:
    """exp(-i * angle * string)."""

    string: PauliString
    angle: float

    def __post_init__(self):
        if self.string.phase_power != 0:
            raise ValueError("rotation string must carry canonical phase +1")

    def inverse(self) -> "PauliRotation":
        return PauliRotation(self.string, -self.angle)


GateOp = Union[SingleQubitGate, CXGate, PauliRotation]


def rz_matrix(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def rx_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


H_MATRIX = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
X_MATRIX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
S_MATRIX = np.diag([1, 1j]).astype(np.complex128)
SDG_MATRIX = np.diag([1, -1j]).astype(np.complex128)


def _check_index(state: StateVector, q: int):
    if not 0 <= q < state.num_qubits:
        raise DimensionError(f"qubit {q} out of range for {state.num_qubits} qubits")


def apply_gate(state: StateVector, g: GateOp) -> StateVector:
    k = _kernels.kernels
    if isinstance(g, SingleQubitGate):
        _check_index(state, g.target)
        k.apply_1q(state.amplitudes, g.matrix, g.target)
    elif isinstance(g, CXGate):
        _check_index(state, g.control)
        _check_index(state, g.target)
        if g.control == g.target:
            raise DimensionError("control and target coincide")
        k.apply_cx(state.amplitudes, g.control, g.target)
    elif isinstance(g, PauliRotation):
        if g.string.width != state.num_qubits:
            raise DimensionError(f"rotation width {g.string.width} != {state.num_qubits}")
        x, z, yph = g.string.masks()
        k.pauli_rotation(state.amplitudes, x, z, yph, np.cos(g.angle), np.sin(g.angle))
    else:
        raise TypeError(f"unknown gate {g!r}")
    return state


def apply_pauli_sum(state: StateVector, op: PauliSum) -> StateVector:
    """Return a new state holding ``op |state>`` (not normalised)."""
    if op.width != state.num_qubits:
        raise DimensionError(f"operator width {op.width} != {state.num_qubits}")
    out = np.zeros_like(state.amplitudes)
    apply = _kernels.kernels.apply_pauli_add
    for c, p in op.terms:
        x, z, yph = p.masks()
        apply(out, state.amplitudes, x, z, c * yph)
    return StateVector(out)


def expectation_complex(state: StateVector, op: PauliSum) -> complex:
    """<state|op|state> for arbitrary (possibly non-Hermitian) ``op``."""
    if op.width != state.num_qubits:
        raise DimensionError(f"operator width {op.width} != {state.num_qubits}")
    expect = _kernels.kernels.pauli_expectation
    total = 0j
    for c, p in op.terms:
        if p.is_identity:
            total += c * np.vdot(state.amplitudes, state.amplitudes)
            continue
        x, z, yph = p.masks()
        total += c * expect(state.amplitudes, x, z, yph)
    return complex(total)


def expectation(state: StateVector, obs: PauliSum) -> float:
    if not obs.is_hermitian():
        raise NonHermitianError("observable has complex coefficients")
    val = expectation_complex(state, obs)
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise NonHermitianError(f"imaginary residue {val.imag:.3e} in expectation")
    return float(val.real)


def inner_product(a: StateVector, b: StateVector) -> complex:
    if a.num_qubits != b.num_qubits:
        raise DimensionError(f"{a.num_qubits} vs {b.num_qubits} qubits")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: StateVector, b: StateVector) -> float:
    return abs(inner_product(a, b)) ** 2


def tensor_with_ancillas(field_state: StateVector, ancilla_count: int) -> StateVector:
    """Append ``ancilla_count`` qubits in |0>; they take the highest indices."""
    if ancilla_count < 0:
        raise ValueError("ancilla_count must be non-negative")
    amps = np.zeros(field_state.amplitudes.shape[0] << ancilla_count, dtype=np.complex128)
    amps[: field_state.amplitudes.shape[0]] = field_state.amplitudes
    return StateVector(amps)


def outcome_probabilities(state: StateVector, q: int) -> tuple[float, float]:
    """Born probabilities ``(p_plus, p_minus)`` of a Z-basis readout of ``q``."""
    _check_index(state, q)
    norm2 = float(np.vdot(state.amplitudes, state.amplitudes).real)
    p1 = _kernels.kernels.prob_one(state.amplitudes, q) / norm2
    return 1.0 - p1, p1


def measure_qubit(state: StateVector, q: int, draw: Optional[float] = None,
                  forced: Optional[int] = None) -> tuple[int, float, StateVector]:
    """Projective Z measurement of qubit ``q``.

    Outcome +1 is bit 0, outcome -1 is bit 1.  Pass either a uniform ``draw``
    in [0, 1) (outcome +1 iff ``draw < p_plus``) or a ``forced`` outcome.
    Returns ``(mu, p_mu, collapsed)``; the input state is left untouched.
    """
    if (draw is None) == (forced is None):
        raise ValueError("give exactly one of draw or forced")
    p_plus, p_minus = outcome_probabilities(state, q)
    if forced is not None:
        if forced not in (1, -1):
            raise ValueError("forced outcome must be +1 or -1")
        mu = forced
    else:
        mu = 1 if draw < p_plus else -1
    p_mu = p_plus if mu == 1 else p_minus
    if p_mu < FORCED_PROB_FLOOR:
        raise ZeroProbabilityError(f"outcome {mu:+d} on qubit {q} has probability {p_mu:.3e}")
    collapsed = state.copy()
    norm = np.sqrt(p_mu * float(np.vdot(state.amplitudes, state.amplitudes).real))
    _kernels.kernels.project(collapsed.amplitudes, q, 0 if mu == 1 else 1, 1.0 / norm)
    return mu, p_mu, collapsed


def sample_observable(state: StateVector, obs: PauliSum, shots: int,
                      seed=None) -> tuple[float, float]:
    """Finite-shot estimate of ``<obs>`` measuring each term in its eigenbasis.

    Every non-identity term gets its own ``shots`` readouts; a readout is +1
    with probability (1 + <P>)/2.  Returns ``(estimate, standard_error)``.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if not obs.is_hermitian():
        raise NonHermitianError("observable has complex coefficients")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    est = 0.0
    var = 0.0
    for c, p in obs.terms:
        coeff = c.real
        if p.is_identity:
            est += coeff
            continue
        ev = expectation_complex(state, PauliSum(obs.width, [(1.0, p)])).real
        p_up = min(1.0, max(0.0, 0.5 * (1.0 + ev)))
        ups = rng.binomial(shots, p_up)
        mean = (2.0 * ups - shots) / shots
        est += coeff * mean
        var += coeff ** 2 * (1.0 - mean ** 2) / shots
    return float(est), float(np.sqrt(var))
