import math
import warnings

import numpy as np
import pytest

import oracles
from fockgen.dynamics import (DecoherenceSpec, InteractionHamiltonian, LindbladSolver, LindbladTrajectory,
                              closed_form_single_atom, collapse_operators, energy_expectations,
                              evolve_lindblad, evolve_unitary, excitation_number, unitary_trajectory)
from fockgen.errors import DimensionMismatch, StepSizeTooLarge
from fockgen.hilbert import CoherentSpec, HilbertLayout, QuantumState, initial_state, ladder_operators
from fockgen.linalg import partial_trace
from fockgen.metrics import trace_distance


@pytest.mark.parametrize("n_atoms", [1, 2, 3])
def test_hamiltonian_matches_elementwise_oracle(n_atoms):
    lay = HilbertLayout(7, n_atoms)
    h = InteractionHamiltonian(lay, g=1.3)
    assert np.allclose(h.matrix, oracles.tc_hamiltonian(7, n_atoms, 1.3), atol=1e-14)


def test_unitary_against_expm():
    spec = CoherentSpec.from_nbar(3.0)
    lay = HilbertLayout(30, 2)
    psi0 = initial_state(spec, 2, 30)
    h = InteractionHamiltonian(lay)
    ref = oracles.propagate(oracles.tc_hamiltonian(30, 2), psi0.data, 4.2)
    assert np.allclose(evolve_unitary(psi0, h, 4.2).data, ref, atol=1e-10)
    rho = evolve_unitary(psi0.to_density(), h, 4.2).data
    assert np.allclose(rho, np.outer(ref, ref.conj()), atol=1e-10)
    traj = unitary_trajectory(psi0, h, [0.0, 4.2])
    assert np.allclose(traj[1], ref, atol=1e-10)


def test_layout_mismatch_raises():
    h = InteractionHamiltonian(HilbertLayout(10, 1))
    psi = initial_state(CoherentSpec.from_nbar(1.0), 1, 12)
    with pytest.raises(DimensionMismatch):
        evolve_unitary(psi, h, 1.0)


def test_closed_form_single_atom():
    spec = CoherentSpec.from_nbar(5.0)
    lay = HilbertLayout(40, 1)
    h = oracles.tc_hamiltonian(40, 1)
    psi0 = initial_state(spec, 1, 40).data
    for t in (0.0, 3.3, 17.0, 41.5):
        cf = closed_form_single_atom(spec, t, lay).data
        assert abs(1 - abs(np.vdot(cf, oracles.propagate(h, psi0, t))) ** 2) < 1e-10


def test_excitation_number_conserved():
    spec = CoherentSpec.from_nbar(4.0)
    lay = HilbertLayout(32, 3)
    h = InteractionHamiltonian(lay)
    nexc = excitation_number(lay)
    assert np.allclose(h.matrix @ nexc, nexc @ h.matrix)
    traj = unitary_trajectory(initial_state(spec, 3, 32), h, np.linspace(0, 30, 13))
    vals = [np.vdot(v, nexc @ v).real for v in traj]
    assert np.ptp(vals) < 1e-8


def test_energy_expectations_constant():
    spec = CoherentSpec.from_nbar(5.0)
    lay = HilbertLayout(36, 1)
    h = InteractionHamiltonian(lay)
    psi0 = initial_state(spec, 1, 36)
    series = [energy_expectations(QuantumState(lay, v)) for v in unitary_trajectory(psi0, h, np.linspace(0, 30, 31))]
    assert np.ptp([e.field + e.atomic for e in series]) < 1e-8
    assert np.ptp([e.interaction for e in series]) < 1e-8
    assert series[0].field == pytest.approx(5.0, abs=1e-8)
    assert series[0].atomic == pytest.approx(1.0)
    mixed = energy_expectations(psi0.to_density())
    assert mixed.total == pytest.approx(series[0].total)


def test_collapse_operators_match_oracle():
    lay = HilbertLayout(5, 2)
    dec = DecoherenceSpec(0.2, 0.1, 0.3)
    mine = [c.toarray() for c in collapse_operators(lay, dec)]
    ref = oracles.jump_operators(5, 2, 0.2, 0.1, 0.3)
    assert len(mine) == len(ref)
    for a, b in zip(mine, ref):
        assert np.allclose(a, b)


@pytest.mark.parametrize("n_atoms", [1, 2])
def test_lindblad_against_superoperator(n_atoms):
    fd = 5
    lay = HilbertLayout(fd, n_atoms)
    h = InteractionHamiltonian(lay)
    dec = DecoherenceSpec(kappa=0.3, gamma=0.2, n_th=0.4)
    rng = np.random.default_rng(3)
    x = rng.normal(size=(lay.total_dim, 3)) + 1j * rng.normal(size=(lay.total_dim, 3))
    rho0 = x @ x.conj().T
    rho0 /= np.trace(rho0).real
    out = LindbladSolver(h, dec, dt=1e-3).advance(rho0, 0.9)
    ref = oracles.lindblad_propagate(h.matrix, oracles.jump_operators(fd, n_atoms, 0.3, 0.2, 0.4), rho0, 0.9)
    assert np.max(np.abs(out - ref)) < 1e-10


def test_lossy_field_frozen_value(frozen):
    # field decoupled from the atom (g = 0), atom kept in |g>
    spec = CoherentSpec.from_nbar(2.0)
    lay = HilbertLayout(16, 1)
    h = InteractionHamiltonian(lay, g=0.0)
    psi = initial_state(spec, 1, 16).data.reshape(16, 2)[:, ::-1].ravel()
    rho = LindbladSolver(h, DecoherenceSpec(kappa=0.3, n_th=0.2)).advance(np.outer(psi, psi.conj()), 1.5)
    _, _, n_op = ladder_operators(16)
    rf = partial_trace(rho, lay, "field")
    assert np.trace(n_op @ rf).real == pytest.approx(frozen["lossy_field_mean_n"], rel=1e-9)


def test_thermal_state_is_stationary():
    fd, nth = 14, 0.3
    lay = HilbertLayout(fd, 1)
    h = InteractionHamiltonian(lay, g=0.0)
    p = (nth / (1 + nth)) ** np.arange(fd)
    pa = np.array([nth, 1 + nth]) / (1 + 2 * nth)  # (|e>, |g>) Boltzmann weights
    rho = np.kron(np.diag(p / p.sum()), np.diag(pa)).astype(complex)
    out = LindbladSolver(h, DecoherenceSpec(kappa=0.5, gamma=0.5, n_th=nth)).advance(rho, 2.0)
    # truncation breaks detailed balance only at the top level
    assert np.max(np.abs(out - rho)) < 1e-6


@pytest.mark.parametrize("n_th", [0.0, 0.2])
def test_lindblad_preserves_trace_and_positivity(n_th):
    spec = CoherentSpec.from_nbar(2.0)
    lay = HilbertLayout(16, 1)
    h = InteractionHamiltonian(lay)
    rho0 = initial_state(spec, 1, 16)
    states = evolve_lindblad(rho0, h, DecoherenceSpec(0.1, 0.1, n_th), np.linspace(0, 5, 6))
    for s in states:
        assert abs(np.trace(s.data).real - 1.0) < 1e-8
        assert np.allclose(s.data, s.data.conj().T)
        assert np.linalg.eigvalsh(s.data)[0] > -1e-9


def test_unitary_limit_of_lindblad():
    spec = CoherentSpec.from_nbar(2.0)
    lay = HilbertLayout(16, 1)
    h = InteractionHamiltonian(lay)
    psi0 = initial_state(spec, 1, 16)
    rho = evolve_lindblad(psi0, h, DecoherenceSpec(), [0.0, 3.0])[-1]
    assert trace_distance(rho.data, evolve_unitary(psi0, h, 3.0).data) < 1e-9


def test_trajectory_matches_direct_evolution():
    spec = CoherentSpec.from_nbar(2.0)
    lay = HilbertLayout(16, 1)
    h = InteractionHamiltonian(lay)
    solver = LindbladSolver(h, DecoherenceSpec(0.05, 0.02, 0.1))
    rho0 = initial_state(spec, 1, 16).density_matrix()
    traj = LindbladTrajectory(solver, rho0, checkpoint_every=0.25)
    late = traj.state_at(2.37)
    early = traj.state_at(1.1)
    assert np.allclose(late, solver.advance(rho0, 2.37), atol=1e-12)
    assert np.allclose(early, solver.advance(rho0, 1.1), atol=1e-12)
    with pytest.raises(ValueError):
        traj.state_at(-1.0)


def test_t_grid_validation():
    lay = HilbertLayout(8, 1)
    psi = QuantumState(lay, np.eye(16)[1])
    with pytest.raises(ValueError):
        evolve_lindblad(psi, InteractionHamiltonian(lay), DecoherenceSpec(0.1), [0.5, 1.0])


def test_unstable_step_raises():
    lay = HilbertLayout(12, 1)
    solver = LindbladSolver(InteractionHamiltonian(lay), DecoherenceSpec(kappa=500.0), dt=0.5)
    rho = initial_state(CoherentSpec.from_nbar(1.0), 1, 12).density_matrix()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(StepSizeTooLarge):
            solver.advance(rho, 50.0)


def test_negative_rates_rejected():
    with pytest.raises(ValueError):
        DecoherenceSpec(kappa=-1.0)
    assert DecoherenceSpec().is_lossless
    assert not DecoherenceSpec(gamma=math.ulp(1.0)).is_lossless
