"""Lattice NJL Hamiltonian in the Jordan-Wigner qubit encoding.

Site ``n`` is qubit ``n``; an occupied site is |1>, so the scalar bilinear
is n_n = (1 - Z_n) / 2.  In mean-field form

    H = sum_{n<N-1} (X_n X_{n+1} + Y_n Y_{n+1}) / (2a)
      + sum_n m_dyn (1 - Z_n) / 2
      - sum_n G c_n (1 - Z_n) / 2

with c_n the site condensate profile.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
import scipy.sparse.linalg as spla

from ..errors import ConvergenceError, DimensionError, ResourceError
from ..pauli import DENSE_QUBIT_CAP, PauliString, PauliSum, pauli_term, simplify
from ..statevector import StateVector, apply_pauli_sum, expectation

DENSE_EIGH_MAX = 12
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class LatticeParams:
    sites: int = 10
    spacing: float = 1.0
    m_dyn: float = 0.4
    G: float = 0.3
    boundary: str = "open"
    staggered: bool = False  # experimental: mass term m_dyn * (-1)**n
    uniform_condensate: bool = False  # use the site-averaged profile in the G term

    def __post_init__(self):
        if self.sites < 1:
            raise ValueError("sites must be >= 1")
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")
        if self.m_dyn < 0:
            raise ValueError("m_dyn must be non-negative")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"boundary must be 'open' or 'periodic', got {self.boundary!r}")
        if self.boundary == "periodic" and self.sites < 3:
            raise ValueError("periodic boundary needs at least 3 sites")

    @property
    def length(self) -> float:
        return self.sites * self.spacing


@dataclass(frozen=True)
class LatticeModel:
    params: LatticeParams
    condensate: tuple[float, ...]
    kinetic: PauliSum
    mass: PauliSum
    interaction: PauliSum
    hamiltonian: PauliSum = field(repr=False)

    @property
    def sites(self) -> int:
        return self.params.sites

    @cached_property
    def spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        """Full eigendecomposition ``(energies, vectors)`` of the dense H."""
        mat = self.hamiltonian.to_dense_matrix()
        if not np.any(mat.imag):
            return np.linalg.eigh(mat.real)
        return np.linalg.eigh(mat)

    def propagator(self, t: float) -> np.ndarray:
        w, v = self.spectrum
        return (v * np.exp(-1j * w * t)) @ v.conj().T

    def sub_sums(self) -> tuple[PauliSum, PauliSum, PauliSum]:
        """Trotter factors in application order: kinetic, mass, interaction."""
        return self.kinetic, self.mass, self.interaction


def _check_site(n: int, sites: int):
    if not 0 <= n < sites:
        raise DimensionError(f"site {n} outside 0..{sites - 1}")


def jordan_wigner_annihilator(n: int, sites: int) -> PauliSum:
    """(prod_{m<n} Z_m) (X_n + i Y_n) / 2."""
    _check_site(n, sites)
    string = {m: "Z" for m in range(n)}
    return PauliSum(sites, [
        (0.5, PauliString.from_sparse(sites, {**string, n: "X"})),
        (0.5j, PauliString.from_sparse(sites, {**string, n: "Y"})),
    ])


def jordan_wigner_creator(n: int, sites: int) -> PauliSum:
    return jordan_wigner_annihilator(n, sites).adjoint()


def site_bilinear(n: int, sites: int) -> PauliSum:
    """(1 - Z_n) / 2, the occupation of site ``n``."""
    _check_site(n, sites)
    return PauliSum(sites, [
        (0.5, PauliString.identity(sites)),
        (-0.5, PauliString.from_sparse(sites, {n: "Z"})),
    ])


def hopping_bond(n: int, m: int, sites: int, spacing: float) -> PauliSum:
    """(psi_n^dag psi_m + h.c.) / a for the bond (n, m)."""
    if m == n + 1:
        return PauliSum(sites, [
            (0.5 / spacing, PauliString.from_sparse(sites, {n: "X", m: "X"})),
            (0.5 / spacing, PauliString.from_sparse(sites, {n: "Y", m: "Y"})),
        ])
    # wrap-around bond carries the Jordan-Wigner string through the chain
    hop = jordan_wigner_creator(n, sites) @ jordan_wigner_annihilator(m, sites)
    return simplify((hop + hop.adjoint()) * (1.0 / spacing))


def bonds(params: LatticeParams) -> list[tuple[int, int]]:
    out = [(n, n + 1) for n in range(params.sites - 1)]
    if params.boundary == "periodic":
        out.append((params.sites - 1, 0))
    return out


def _onsite(params: LatticeParams, condensate: Sequence[float], n: int):
    """(mass coefficient, interaction coefficient) multiplying (1 - Z_n)/2 at site n."""
    mass = params.m_dyn * ((-1) ** n if params.staggered else 1.0)
    c = float(np.mean(condensate)) if params.uniform_condensate else condensate[n]
    return mass, -params.G * c


def build_hamiltonian(params: LatticeParams, condensate: Sequence[float]) -> LatticeModel:
    N = params.sites
    condensate = tuple(float(c) for c in condensate)
    if len(condensate) != N:
        raise DimensionError(f"condensate length {len(condensate)} != {N} sites")
    kinetic = PauliSum.zero(N)
    for n, m in bonds(params):
        kinetic = kinetic + hopping_bond(n, m, N, params.spacing)
    mass = PauliSum.zero(N)
    inter = PauliSum.zero(N)
    for n in range(N):
        cm, ci = _onsite(params, condensate, n)
        mass = mass + site_bilinear(n, N) * cm
        inter = inter + site_bilinear(n, N) * ci
    return LatticeModel(params, condensate, kinetic, mass, inter,
                        simplify(kinetic + mass + inter))


def _gauge_fix(vec: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(vec) > 1e-8))
    return vec * (abs(vec[k]) / vec[k])


def _pick_from_degenerate(vecs: np.ndarray) -> np.ndarray:
    """Deterministic representative of a degenerate eigenspace.

    Project the first computational basis state with weight in the space onto
    the space, then normalise and make that amplitude real-positive.
    """
    weights = np.sum(np.abs(vecs) ** 2, axis=1)
    k = int(np.argmax(weights > 1e-8))
    rep = vecs @ vecs[k].conj()
    return _gauge_fix(rep / np.linalg.norm(rep))


def ground_state(model: LatticeModel, cap: int = DENSE_QUBIT_CAP) -> StateVector:
    N = model.sites
    if N > cap:
        raise ResourceError(f"{N} sites exceeds dense cap {cap}")
    if N <= DENSE_EIGH_MAX:
        w, v = model.spectrum
    else:
        dim = 1 << N
        op = spla.LinearOperator(
            (dim, dim), dtype=np.complex128,
            matvec=lambda x: apply_pauli_sum(StateVector(x), model.hamiltonian).amplitudes)
        w, v = spla.eigsh(op, k=6, which="SA", tol=1e-12)
        order = np.argsort(w)
        w, v = w[order], v[:, order]
    ground = np.abs(w - w[0]) < DEGENERACY_TOL
    if ground.sum() == 1:
        vec = _gauge_fix(v[:, 0])
    else:
        vec = _pick_from_degenerate(v[:, ground])
    return StateVector(vec.astype(np.complex128))


def ground_energy(model: LatticeModel) -> float:
    return float(model.spectrum[0][0])


def site_densities(state: StateVector, sites: int) -> np.ndarray:
    """<(1 - Z_n)/2> for each field site; ancillas above ``sites`` are ignored."""
    width = state.num_qubits
    return np.array([expectation(state, site_bilinear(n, sites).padded(width))
                     for n in range(sites)])


@dataclass
class SelfConsistentResult:
    condensate: tuple[float, ...]
    model: LatticeModel
    iterations: int
    history: list[float]


def self_consistent_condensate(params: LatticeParams, initial: Optional[Sequence[float]] = None,
                               mixing: float = 0.5, tol: float = 1e-8,
                               max_iter: int = 200) -> SelfConsistentResult:
    """Iterate profile -> H -> vacuum -> site densities until the profile is stationary.

    Converged when the measured densities differ from the input profile by
    less than ``tol`` on every site.  With G = 0 the profile does not feed
    back into H and the first solve is final.
    """
    N = params.sites
    c = np.zeros(N) if initial is None else np.asarray(initial, dtype=float)
    if c.shape != (N,):
        raise DimensionError(f"initial profile needs {N} entries")
    history = []
    for it in range(1, max_iter + 1):
        model = build_hamiltonian(params, c)
        dens = site_densities(ground_state(model), N)
        change = float(np.max(np.abs(dens - c)))
        history.append(change)
        if params.G == 0.0:
            model = build_hamiltonian(params, dens)
            return SelfConsistentResult(model.condensate, model, it, history)
        if change < tol:
            return SelfConsistentResult(model.condensate, model, it, history)
        c = (1.0 - mixing) * c + mixing * dens
    raise ConvergenceError(f"condensate did not converge in {max_iter} iterations",
                           residual=history[-1], history=history)


def local_energy_operator(n0: int, model: LatticeModel) -> PauliSum:
    """Energy density at ``n0``: its on-site terms plus half of each adjacent bond.

    Summed over all sites this reproduces the Hamiltonian term by term.
    """
    params = model.params
    N = params.sites
    _check_site(n0, N)
    cm, ci = _onsite(params, model.condensate, n0)
    out = site_bilinear(n0, N) * (cm + ci)
    for n, m in bonds(params):
        if n0 in (n, m):
            out = out + hopping_bond(n, m, N, params.spacing) * 0.5
    return out


def _field_matrix_apply(state: StateVector, mat: np.ndarray, sites: int) -> np.ndarray:
    block = state.amplitudes.reshape(-1, 1 << sites)
    return (block @ mat.T).reshape(-1)


def evolve_exact(state: StateVector, model: LatticeModel, t: float) -> StateVector:
    """exp(-i H t) on the field qubits (ancillas untouched) via the dense propagator."""
    return StateVector(_field_matrix_apply(state, model.propagator(t), model.sites))


def finite_difference_t00(state: StateVector, model: LatticeModel, n0: int, dt: float) -> float:
    """Two-time estimator Re i<psi^dag_n0 (psi_n0(t+dt) - psi_n0(t))>/dt.

    psi(t+dt) is the Heisenberg-evolved annihilator under the exact model
    propagator.  As dt -> 0 the estimate tends to the expectation of
    :func:`local_energy_operator` (difference is O(dt)).
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    N = model.sites
    _check_site(n0, N)
    psi = jordan_wigner_annihilator(n0, N).to_dense_matrix()
    u = model.propagator(dt)
    phi = _field_matrix_apply(state, psi, N)
    moved = _field_matrix_apply(state, u, N)
    moved = _field_matrix_apply(StateVector(moved), psi, N)
    moved = _field_matrix_apply(StateVector(moved), u.conj().T, N)
    two_time = np.vdot(phi, moved)
    same_time = np.vdot(phi, phi)
    return float((1j * (two_time - same_time) / dt).real)


# ------------------------------------------------------------ text format ---


def format_model(model: LatticeModel) -> str:
    p = model.params
    lines = [
        "# lattice NJL model",
        f"sites = {p.sites}",
        f"spacing = {p.spacing!r}",
        f"m_dyn = {p.m_dyn!r}",
        f"G = {p.G!r}",
        f"boundary = {p.boundary}",
        f"staggered = {str(p.staggered).lower()}",
        f"uniform_condensate = {str(p.uniform_condensate).lower()}",
        "condensate = " + " ".join(repr(c) for c in model.condensate),
        "[hamiltonian]",
        model.hamiltonian.render(),
    ]
    return "\n".join(lines) + "\n"


def parse_model(text: str) -> LatticeModel:
    head, _, _ = text.partition("[hamiltonian]")
    kv = {}
    for line in head.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, val = line.partition("=")
        kv[key.strip()] = val.strip()
    params = LatticeParams(
        sites=int(kv["sites"]), spacing=float(kv["spacing"]), m_dyn=float(kv["m_dyn"]),
        G=float(kv["G"]), boundary=kv["boundary"], staggered=kv["staggered"] == "true",
        uniform_condensate=kv["uniform_condensate"] == "true")
    return build_hamiltonian(params, [float(x) for x in kv["condensate"].split()])


def with_params(model: LatticeModel, **changes) -> LatticeModel:
    return build_hamiltonian(replace(model.params, **changes), model.condensate)
