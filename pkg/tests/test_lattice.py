import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from njl_qet.errors import DimensionError, ResourceError
from njl_qet.njl.lattice import (LatticeParams, build_hamiltonian, evolve_exact,
                                 finite_difference_t00, format_model, ground_energy,
                                 ground_state, hopping_bond, jordan_wigner_annihilator,
                                 jordan_wigner_creator, local_energy_operator, parse_model,
                                 self_consistent_condensate, site_bilinear, site_densities)
from njl_qet.pauli import PauliString, PauliSum, simplify
from njl_qet.statevector import StateVector, expectation, fidelity

from conftest import kron_oracle


def model(n=4, **kw):
    p = LatticeParams(sites=n, **kw)
    return build_hamiltonian(p, np.linspace(0.2, 0.6, n))


def test_annihilator_first_site():
    a = jordan_wigner_annihilator(0, 1)
    assert a.terms == ((0.5, PauliString("X")), (0.5j, PauliString("Y")))


def test_annihilator_second_site():
    a = simplify(jordan_wigner_annihilator(1, 2))
    assert dict((p.factors, c) for c, p in a.terms) == {"ZX": 0.5, "ZY": 0.5j}


def test_annihilator_lowers_occupation():
    # occupied site is |1>
    a = jordan_wigner_annihilator(0, 1).to_dense_matrix()
    assert np.allclose(a, [[0, 1], [0, 0]])


def test_site_index_checked():
    with pytest.raises(DimensionError):
        jordan_wigner_annihilator(3, 3)
    with pytest.raises(DimensionError):
        site_bilinear(-1, 3)


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5])
def test_car_dense(N):
    eye = np.eye(2**N)
    ann = [jordan_wigner_annihilator(n, N).to_dense_matrix() for n in range(N)]
    for n, m in itertools.product(range(N), repeat=2):
        a, b = ann[n], ann[m]
        assert np.max(np.abs(a @ b.conj().T + b.conj().T @ a - (n == m) * eye)) < 1e-13
        assert np.max(np.abs(a @ b + b @ a)) < 1e-13


@pytest.mark.parametrize("N", [2, 3, 5])
def test_car_symbolic(N):
    ident = PauliSum.identity(N)
    for n, m in itertools.product(range(N), repeat=2):
        anti = jordan_wigner_annihilator(n, N).anticommutator(jordan_wigner_creator(m, N))
        assert anti.is_close(ident if n == m else PauliSum.zero(N), tol=1e-15)


def test_bilinear_is_number_operator():
    N = 3
    for n in range(N):
        num = jordan_wigner_creator(n, N) @ jordan_wigner_annihilator(n, N)
        assert np.allclose(num.to_dense_matrix(), site_bilinear(n, N).to_dense_matrix(),
                           atol=1e-15)
    assert expectation(StateVector.zero_state(3), site_bilinear(1, 3)) == 0
    assert expectation(StateVector.from_bits("010"), site_bilinear(1, 3)) == 1


@pytest.mark.parametrize("n,m", [(0, 1), (2, 3), (3, 0)])
def test_hopping_matches_jw_product(n, m):
    N = 4
    hop = jordan_wigner_creator(n, N) @ jordan_wigner_annihilator(m, N)
    ref = (hop + hop.adjoint()).to_dense_matrix() / 0.7
    assert np.allclose(hopping_bond(n, m, N, 0.7).to_dense_matrix(), ref, atol=1e-14)


def test_pure_hopping_two_sites():
    m = build_hamiltonian(LatticeParams(sites=2, m_dyn=0.0, G=0.0), [0.0, 0.0])
    assert m.hamiltonian.terms == ((0.5, PauliString("XX")), (0.5, PauliString("YY")))


def test_two_sites_mass_kron_oracle():
    m = build_hamiltonian(LatticeParams(sites=2, m_dyn=0.4, G=0.0), [0.0, 0.0])
    ref = 0.5 * (kron_oracle("XX") + kron_oracle("YY")) \
        + 0.2 * (2 * np.eye(4) - kron_oracle("ZI") - kron_oracle("IZ"))
    assert np.allclose(m.hamiltonian.to_dense_matrix(), ref, atol=1e-15)
    assert abs(ground_energy(m) - np.linalg.eigvalsh(ref)[0]) < 1e-12
    assert abs(expectation(ground_state(m), m.hamiltonian) - np.linalg.eigvalsh(ref)[0]) < 1e-12


def test_production_model_terms():
    m = build_hamiltonian(LatticeParams(), [0.5] * 10)
    assert m.params.sites == 10 and m.params.length == 10.0
    assert len(m.kinetic) == 18 and len(m.mass) == 11 and len(m.interaction) == 11
    assert m.hamiltonian == m.kinetic + m.mass + m.interaction
    assert m.hamiltonian.is_hermitian()


def test_condensate_length_checked():
    with pytest.raises(DimensionError):
        build_hamiltonian(LatticeParams(sites=3), [0.1, 0.2])


@pytest.mark.parametrize("kw", [{"sites": 0}, {"spacing": 0.0}, {"m_dyn": -1.0},
                                {"sites": 2, "boundary": "periodic"}, {"boundary": "twisted"}])
def test_params_validation(kw):
    with pytest.raises(ValueError):
        LatticeParams(**kw)


@pytest.mark.parametrize("kw", [{}, {"boundary": "periodic"}, {"staggered": True}])
def test_number_conservation(kw):
    for N in (3, 4, 5):
        m = model(N, **kw)
        h = m.hamiltonian.to_dense_matrix()
        num = sum((site_bilinear(n, N) for n in range(N)), PauliSum.zero(N)).to_dense_matrix()
        assert np.max(np.abs(h @ num - num @ h)) < 1e-12


def test_periodic_adds_wrap_bond():
    m = model(4, boundary="periodic")
    open_m = model(4)
    extra = m.kinetic - open_m.kinetic
    assert extra == hopping_bond(3, 0, 4, 1.0)
    assert {p.factors for _, p in extra.terms} == {"XZZX", "YZZY"}


def test_single_site_vacuum_is_empty():
    m = build_hamiltonian(LatticeParams(sites=1, m_dyn=0.7, G=0.0), [0.0])
    assert np.allclose(ground_state(m).amplitudes, [1, 0])


def test_two_site_hopping_vacuum():
    m = build_hamiltonian(LatticeParams(sites=2, spacing=0.5, m_dyn=0.0, G=0.0), [0, 0])
    g = ground_state(m)
    w = np.linalg.eigvalsh(m.hamiltonian.to_dense_matrix())
    assert abs(ground_energy(m) - (-1 / 0.5)) < 1e-12 and abs(w[0] + 2.0) < 1e-12
    # weight only on |01>, |10>
    assert abs(abs(g.amplitudes[1]) ** 2 + abs(g.amplitudes[2]) ** 2 - 1) < 1e-12
    assert abs(g.amplitudes[1]) - 1 / np.sqrt(2) < 1e-12


def test_ground_state_gauge_and_degeneracy():
    # pure hopping on 3 sites has degenerate ground levels
    m = build_hamiltonian(LatticeParams(sites=3, m_dyn=0.0, G=0.0), [0, 0, 0])
    g1, g2 = ground_state(m), ground_state(m)
    assert np.array_equal(g1.amplitudes, g2.amplitudes)
    k = np.flatnonzero(np.abs(g1.amplitudes) > 1e-8)[0]
    assert g1.amplitudes[k].imag == 0 and g1.amplitudes[k].real > 0
    assert abs(expectation(g1, m.hamiltonian) - ground_energy(m)) < 1e-12


def test_ground_state_cap():
    with pytest.raises(ResourceError):
        ground_state(model(4), cap=3)


def test_variational_bound(rng):
    m = model(6)
    e0 = ground_energy(m)
    assert all(expectation(StateVector.random(6, rng), m.hamiltonian) >= e0 - 1e-12
               for _ in range(200))


def test_partition_identity():
    for kw in ({}, {"boundary": "periodic"}, {"staggered": True}):
        m = model(5, **kw)
        total = PauliSum.zero(5)
        for n in range(5):
            total = total + local_energy_operator(n, m)
        assert total.is_close(m.hamiltonian, tol=1e-14)


def test_local_energy_two_site_hopping():
    m = build_hamiltonian(LatticeParams(sites=2, m_dyn=0.0, G=0.0), [0, 0])
    t = local_energy_operator(0, m)
    assert t.terms == ((0.25, PauliString("XX")), (0.25, PauliString("YY")))


def test_periodic_uniform_density_translation():
    p = LatticeParams(sites=6, boundary="periodic", uniform_condensate=True)
    m = build_hamiltonian(p, [0.4] * 6)
    g = ground_state(m)
    dens = [expectation(g, local_energy_operator(n, m)) for n in range(6)]
    assert np.allclose(dens, ground_energy(m) / 6, atol=1e-10)


def test_scf_free_one_iteration():
    res = self_consistent_condensate(LatticeParams(sites=4, G=0.0))
    assert res.iterations == 1
    dens = site_densities(ground_state(res.model), 4)
    assert np.allclose(res.condensate, dens, atol=1e-14)


def test_scf_fixed_point():
    p = LatticeParams(sites=4, m_dyn=0.4, G=0.3)
    res = self_consistent_condensate(p)
    again = site_densities(ground_state(res.model), 4)
    assert np.max(np.abs(again - np.array(res.condensate))) < 1e-8
    assert all(0 <= c <= 1 for c in res.condensate)


@pytest.mark.slow
def test_scf_multistart_production():
    p = LatticeParams()
    a = self_consistent_condensate(p, initial=[0.5] * 10)
    b = self_consistent_condensate(p, initial=np.random.default_rng(7).uniform(0, 1, 10))
    assert np.max(np.abs(np.array(a.condensate) - np.array(b.condensate))) < 1e-6


def test_model_text_roundtrip():
    m = model(4, boundary="periodic")
    back = parse_model(format_model(m))
    assert back.params == m.params and back.condensate == m.condensate
    assert back.hamiltonian == m.hamiltonian


def test_evolve_exact_conserves_energy(rng):
    m = model(5)
    s = StateVector.random(7, rng)  # two ancillas above the field
    h = m.hamiltonian.padded(7)
    e = expectation(s, h)
    for t in (0.3, 2.0, 11.0):
        assert abs(expectation(evolve_exact(s, m, t), h) - e) < 1e-10


def test_fd_t00_stationary_on_eigenstate():
    # a two-time correlator on an eigenstate depends only on the time difference
    m = model(4)
    g = ground_state(m)
    later = evolve_exact(g, m, 1.7)
    for dt in (0.1, 0.01):
        assert abs(finite_difference_t00(g, m, 1, dt) - finite_difference_t00(later, m, 1, dt)) < 1e-10


def test_fd_t00_first_order(rng):
    m = model(4)
    s = StateVector.random(4, rng)
    limit = expectation(s, local_energy_operator(2, m))
    errs = [abs(finite_difference_t00(s, m, 2, dt) - limit) for dt in (1e-2, 5e-3, 2.5e-3)]
    assert 1.7 < errs[0] / errs[1] < 2.3 and 1.7 < errs[1] / errs[2] < 2.3


def test_fd_t00_commutator_limit(rng):
    m = model(4)
    s = StateVector.random(4, rng)
    psi = jordan_wigner_annihilator(1, 4).to_dense_matrix()
    h = m.hamiltonian.to_dense_matrix()
    comm = -np.vdot(psi @ s.amplitudes, (h @ psi - psi @ h) @ s.amplitudes).real
    assert abs(finite_difference_t00(s, m, 1, 1e-4) - comm) < 1e-3
    with pytest.raises(ValueError):
        finite_difference_t00(s, m, 1, 0.0)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_local_energy_hermitian(N, seed):
    r = np.random.default_rng(seed)
    m = build_hamiltonian(LatticeParams(sites=N, m_dyn=float(r.uniform(0, 1)),
                                        G=float(r.uniform(0, 1))), r.uniform(0, 1, N))
    for n in range(N):
        assert local_energy_operator(n, m).is_hermitian()
