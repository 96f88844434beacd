"""Timelike quantum energy teleportation on the lattice NJL vacuum.

Register layout: field sites are qubits 0..N-1, Alice's detector is qubit N,
Bob's detector is qubit N+1.  A run goes

    vacuum -> Alice coupling exp(-i lambda_A sz_A Z_n0) -> Z readout of Alice
    -> free evolution t0 -> t1 -> Bob's kick exp(i lambda_B m_B (1 - Z_n0)/2)

and books dE_A on the full Hamiltonian, dE_B on the energy density at n0.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Optional, Union

import numpy as np

from . import _kernels
from .errors import ConfigError
from .njl.lattice import (LatticeModel, LatticeParams, evolve_exact, finite_difference_t00,
                          ground_state, local_energy_operator, self_consistent_condensate,
                          site_bilinear)
from .pauli import PauliString, PauliSum
from .statevector import (CXGate, PauliRotation, SingleQubitGate, StateVector, X_MATRIX,
                          apply_gate, expectation, measure_qubit, rz_matrix,
                          sample_observable, tensor_with_ancillas)

log = logging.getLogger(__name__)

BobRule = Union[str, Callable[[int], float]]

_BOB_RULES = {
    "mu": lambda mu: float(mu),
    "-mu": lambda mu: -float(mu),
    "+1": lambda mu: 1.0,
    "-1": lambda mu: -1.0,
}


@dataclass(frozen=True)
class ProtocolConfig:
    lattice: LatticeParams = field(default_factory=LatticeParams)
    n0: int = 0
    lambda_a: float = 0.05
    lambda_b: float = 0.5
    t0: float = 0.0
    t1: float = 6.0
    dt: float = 0.01
    steps: int = 600
    mode: str = "exact"
    shots: int = 1000
    seed: Optional[int] = None
    forced_outcome: Optional[int] = None
    bob_rule: BobRule = "mu"
    evolution: str = "trotter"

    def __post_init__(self):
        if self.steps < 1:
            raise ConfigError("steps must be >= 1")
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        if abs(self.steps * self.dt - (self.t1 - self.t0)) >= 1e-12 * max(1.0, abs(self.t1)):
            raise ConfigError(f"steps*dt = {self.steps * self.dt!r} does not match "
                              f"t1 - t0 = {self.t1 - self.t0!r}")
        if not 0 <= self.n0 < self.lattice.sites:
            raise ConfigError(f"n0 = {self.n0} outside 0..{self.lattice.sites - 1}")
        if self.mode not in ("exact", "sampled"):
            raise ConfigError(f"mode must be 'exact' or 'sampled', got {self.mode!r}")
        if self.mode == "sampled" and self.shots < 1:
            raise ConfigError("shots must be >= 1")
        if self.forced_outcome not in (None, 1, -1):
            raise ConfigError("forced_outcome must be +1, -1 or None")
        if isinstance(self.bob_rule, str) and self.bob_rule not in _BOB_RULES:
            raise ConfigError(f"unknown bob_rule {self.bob_rule!r}; use one of {sorted(_BOB_RULES)}")
        if self.evolution not in ("trotter", "exact"):
            raise ConfigError("evolution must be 'trotter' or 'exact'")

    @property
    def alice_qubit(self) -> int:
        return self.lattice.sites

    @property
    def bob_qubit(self) -> int:
        return self.lattice.sites + 1

    @property
    def num_qubits(self) -> int:
        return self.lattice.sites + 2

    def bob_sign(self, mu: int) -> float:
        rule = _BOB_RULES[self.bob_rule] if isinstance(self.bob_rule, str) else self.bob_rule
        return float(rule(mu))

    def with_couplings(self, lambda_a: float, lambda_b: float) -> "ProtocolConfig":
        return replace(self, lambda_a=lambda_a, lambda_b=lambda_b)


@dataclass
class EnergyReport:
    lambda_a: float
    lambda_b: float
    mu: int
    p_mu: float
    dE_A: float
    dE_B: float
    dE_net: float
    correlation: float
    vacuum_energy: float
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "EnergyReport":
        return cls(**d)


@dataclass
class Prepared:
    """Vacuum with ancillas attached, plus the model that produced it."""

    state: StateVector
    model: LatticeModel
    field_vacuum: StateVector
    scf_iterations: int = 0


@dataclass
class AliceStage:
    mu: int
    p_mu: float
    post_measure: StateVector
    evolved: StateVector
    dE_A: float
    dE_A_stderr: float = 0.0
    stage_energies: dict = field(default_factory=dict)


# ---------------------------------------------------------------- stages ---


def _rngs(cfg: ProtocolConfig):
    """Independent streams for (measurement draw, dE_A sampling, dE_B sampling)."""
    seqs = np.random.SeedSequence(cfg.seed).spawn(3)
    return tuple(np.random.default_rng(s) for s in seqs)


def prepare_initial_state(cfg: ProtocolConfig) -> Prepared:
    scf = self_consistent_condensate(cfg.lattice)
    vac = ground_state(scf.model)
    log.info("vacuum ready: %d sites, condensate converged in %d iterations",
             cfg.lattice.sites, scf.iterations)
    return Prepared(tensor_with_ancillas(vac, 2), scf.model, vac, scf.iterations)


def _zz(cfg: ProtocolConfig, a: int, b: int) -> PauliString:
    return PauliString.from_sparse(cfg.num_qubits, {a: "Z", b: "Z"})


def alice_gates(cfg: ProtocolConfig) -> list:
    """CX(A -> n0), RZ(2 lambda_A) on n0, CX(A -> n0)."""
    a, n0 = cfg.alice_qubit, cfg.n0
    return [CXGate(a, n0), SingleQubitGate(rz_matrix(2.0 * cfg.lambda_a), n0, "rz"),
            CXGate(a, n0)]


def alice_interaction(state: StateVector, cfg: ProtocolConfig,
                      decomposed: bool = False) -> StateVector:
    """Single pulse exp(-i lambda_A sz_A Z_n0), in place."""
    if decomposed:
        for g in alice_gates(cfg):
            apply_gate(state, g)
        return state
    return apply_gate(state, PauliRotation(_zz(cfg, cfg.alice_qubit, cfg.n0), cfg.lambda_a))


def alice_measure(state: StateVector, cfg: ProtocolConfig, rng=None):
    """Z readout of Alice's detector -> (mu, p_mu, collapsed state)."""
    if cfg.forced_outcome is not None:
        return measure_qubit(state, cfg.alice_qubit, forced=cfg.forced_outcome)
    rng = rng if rng is not None else _rngs(cfg)[0]
    return measure_qubit(state, cfg.alice_qubit, draw=float(rng.random()))


def _trotter_schedule(model: LatticeModel):
    sched = []
    for part in model.sub_sums():
        for c, p in part.terms:
            x, z, yph = p.masks()
            sched.append((x, z, yph, c.real))
    return sched


def trotter_evolve(state: StateVector, model: LatticeModel, steps: int,
                   dt: float) -> StateVector:
    """[e^{-i H_kin dt} e^{-i H_mass dt} e^{-i H_int dt}]^steps, term by term, in place.

    Within each factor terms run in canonical Pauli-sum order.  Identity
    terms contribute their global phase.  Field masks stay valid with
    ancillas attached because ancillas sit above the field bits.
    """
    rot = _kernels.kernels.pauli_rotation
    amps = state.amplitudes
    sched = []
    phase = 0.0
    for x, z, yph, c in _trotter_schedule(model):
        if x == 0 and z == 0:
            phase += c * dt
        else:
            sched.append((x, z, yph, math.cos(c * dt), math.sin(c * dt)))
    step_phase = complex(math.cos(phase), -math.sin(phase))
    for _ in range(steps):
        for x, z, yph, cs, sn in sched:
            rot(amps, x, z, yph, cs, sn)
        if phase:
            amps *= step_phase
    return state


def free_evolution(state: StateVector, model: LatticeModel, cfg: ProtocolConfig) -> StateVector:
    if cfg.evolution == "exact":
        return evolve_exact(state, model, cfg.t1 - cfg.t0)
    return trotter_evolve(state.copy(), model, cfg.steps, cfg.dt)


def bob_gates(cfg: ProtocolConfig, mu: int) -> list:
    """Circuit rendering with Bob's detector holding m_B as its Z eigenvalue.

    The detector is flipped to |1> when m_B = -1 (classically conditioned on
    Alice's bit), the CX-RZ-CX block applies exp(-i lambda_B/2 sz_B Z_n0),
    an RZ on the detector supplies the identity part of (1 - Z)/2, and the
    flip is undone so the detector ends in |0>.
    """
    m_b = cfg.bob_sign(mu)
    if m_b not in (1.0, -1.0):
        raise ValueError("circuit rendering needs m_B = +1 or -1")
    b, n0 = cfg.bob_qubit, cfg.n0
    flip = [SingleQubitGate(X_MATRIX, b, "x")] if m_b < 0 else []
    return flip + [CXGate(b, n0), SingleQubitGate(rz_matrix(cfg.lambda_b), n0, "rz"),
                   CXGate(b, n0), SingleQubitGate(rz_matrix(-cfg.lambda_b), b, "rz")] + flip


def bob_interaction(state: StateVector, cfg: ProtocolConfig, mu: int,
                    decomposed: bool = False) -> StateVector:
    """exp(+i lambda_B m_B (1 - Z_n0)/2) with m_B from the conditioning rule, in place."""
    if decomposed:
        for g in bob_gates(cfg, mu):
            apply_gate(state, g)
        return state
    angle = cfg.lambda_b * cfg.bob_sign(mu)
    z = PauliString.from_sparse(state.num_qubits, {cfg.n0: "Z"})
    apply_gate(state, PauliRotation(z, 0.5 * angle))
    state.amplitudes *= np.exp(0.5j * angle)
    return state


def _field_op(op: PauliSum, width: int) -> PauliSum:
    return op if op.width == width else op.padded(width)


def energy_injection(vacuum_state: StateVector, post_measure_state: StateVector,
                     model: LatticeModel) -> float:
    """<psi_mu|H|psi_mu> - <Omega|H|Omega>."""
    h = _field_op(model.hamiltonian, post_measure_state.num_qubits)
    return expectation(post_measure_state, h) - expectation(vacuum_state, h)


def energy_extraction(pre_bob_state: StateVector, post_bob_state: StateVector,
                      model: LatticeModel, n0: int) -> float:
    """Change of the energy density at n0 caused by Bob's kick."""
    t00 = _field_op(local_energy_operator(n0, model), post_bob_state.num_qubits)
    return expectation(post_bob_state, t00) - expectation(pre_bob_state, t00)


def measure_correlation(state: StateVector, n0: int, sites: Optional[int] = None) -> float:
    """<(1 - Z_n0)/2>, the bilinear carrying the memory of Alice's kick."""
    sites = state.num_qubits if sites is None else sites
    return expectation(state, _field_op(site_bilinear(n0, sites), state.num_qubits))


# ------------------------------------------------------------- pipeline ---


def alice_stage(cfg: ProtocolConfig, prepared: Prepared) -> AliceStage:
    """Everything up to t1; independent of lambda_B, so sweeps can reuse it."""
    draw_rng, inject_rng, _ = _rngs(cfg)
    model = prepared.model
    coupled = alice_interaction(prepared.state.copy(), cfg)
    mu, p_mu, post = alice_measure(coupled, cfg, draw_rng)
    h = _field_op(model.hamiltonian, cfg.num_qubits)
    e_vac = expectation(prepared.state, h)
    if cfg.mode == "exact":
        d_a, d_a_se = energy_injection(prepared.state, post, model), 0.0
    else:
        e_post, se_post = sample_observable(post, h, cfg.shots, inject_rng)
        e_ref, se_ref = sample_observable(prepared.state, h, cfg.shots, inject_rng)
        d_a, d_a_se = e_post - e_ref, math.hypot(se_post, se_ref)
    evolved = free_evolution(post, model, cfg)
    energies = {"E_vacuum": e_vac, "E_after_alice": expectation(post, h),
                "E_t1": expectation(evolved, h)}
    return AliceStage(mu, p_mu, post, evolved, d_a, d_a_se, energies)


def run_protocol(cfg: ProtocolConfig, prepared: Optional[Prepared] = None,
                 alice: Optional[AliceStage] = None) -> EnergyReport:
    prepared = prepared if prepared is not None else prepare_initial_state(cfg)
    alice = alice if alice is not None else alice_stage(cfg, prepared)
    model = prepared.model
    _, _, extract_rng = _rngs(cfg)

    pre_bob = alice.evolved
    correlation = measure_correlation(pre_bob, cfg.n0, cfg.lattice.sites)
    post_bob = bob_interaction(pre_bob.copy(), cfg, alice.mu)

    t00 = _field_op(local_energy_operator(cfg.n0, model), cfg.num_qubits)
    if cfg.mode == "exact":
        d_b = energy_extraction(pre_bob, post_bob, model, cfg.n0)
        d_b_se = 0.0
    else:
        after, se_after = sample_observable(post_bob, t00, cfg.shots, extract_rng)
        before, se_before = sample_observable(pre_bob, t00, cfg.shots, extract_rng)
        d_b, d_b_se = after - before, math.hypot(se_after, se_before)

    h = _field_op(model.hamiltonian, cfg.num_qubits)
    diag = dict(alice.stage_energies)
    diag.update({
        "E_after_bob": expectation(post_bob, h),
        "T00_before_bob": expectation(pre_bob, t00),
        "T00_after_bob": expectation(post_bob, t00),
        "fd_T00_before_bob": finite_difference_t00(pre_bob, model, cfg.n0, cfg.dt),
        "fd_T00_after_bob": finite_difference_t00(post_bob, model, cfg.n0, cfg.dt),
        "m_B": cfg.bob_sign(alice.mu),
        "dE_A_stderr": alice.dE_A_stderr,
        "dE_B_stderr": d_b_se,
    })
    diag["fd_dE_B"] = diag["fd_T00_after_bob"] - diag["fd_T00_before_bob"]
    return EnergyReport(
        lambda_a=cfg.lambda_a, lambda_b=cfg.lambda_b, mu=alice.mu, p_mu=alice.p_mu,
        dE_A=alice.dE_A, dE_B=d_b, dE_net=d_b - alice.dE_A, correlation=correlation,
        vacuum_energy=diag["E_vacuum"], diagnostics=diag)


# ------------------------------------------------------- weak coupling ---


def perturbative_delta_eb(cfg: ProtocolConfig, prepared: Optional[Prepared] = None) -> float:
    """First-order (in each coupling) estimate of dE_B.

    With K = [T00, F], F = (1 - Z_n0)/2, phi0 = U Omega and phi1 = U Z_n0 Omega
    (U the exact propagator over t1 - t0, Z_n0 the field side of Alice's
    coupling with her detector in |0>):

        dE_B ~ i l_B <phi0|K|phi0> + l_A l_B (<phi0|K|phi1> + c.c.)

    where l_B already carries Bob's sign m_B for mu = +1.
    """
    if cfg.lambda_b == 0.0:
        return 0.0
    prepared = prepared if prepared is not None else prepare_initial_state(cfg)
    model = prepared.model
    N = model.sites
    omega = prepared.field_vacuum.amplitudes
    u = model.propagator(cfg.t1 - cfg.t0)
    z = PauliSum.from_string(PauliString.from_sparse(N, {cfg.n0: "Z"})).to_dense_matrix()
    f = site_bilinear(cfg.n0, N).to_dense_matrix()
    t = local_energy_operator(cfg.n0, model).to_dense_matrix()
    k = t @ f - f @ t
    phi0 = u @ omega
    phi1 = u @ (z @ omega)
    lam_b = cfg.lambda_b * cfg.bob_sign(1)
    lead = 1j * lam_b * np.vdot(phi0, k @ phi0)
    cross = cfg.lambda_a * lam_b * np.vdot(phi0, k @ phi1)
    return float((lead + cross + np.conj(cross)).real)
