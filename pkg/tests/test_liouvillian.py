import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tcladder.eigenanalysis import population_eigenvalues, transition_eigenvalues
from tcladder.hamiltonian import build_hamiltonian
from tcladder.liouvillian import (
    build_generator,
    dissipator,
    evolve,
    expectation,
    generator_eig_to_line,
    population_block,
    raising_coherence_generator,
    regression_block,
)
from tcladder.space import DickeLabel, SystemParams, bare_operators, build_basis
from tcladder.verify import assignment_distance


def _pure(basis, photons, label):
    rho = np.zeros((basis.dim, basis.dim), complex)
    k = basis.index_of(photons, label)
    rho[k, k] = 1.0
    return rho


class TestDissipator:
    def test_single_photon_decay_channel(self, basis2):
        ops = bare_operators(basis2)
        rho = _pure(basis2, 1, DickeLabel.T_MINUS)
        out = dissipator(ops.a, rho)
        expected = 2.0 * (_pure(basis2, 0, DickeLabel.T_MINUS) - rho)
        assert np.allclose(out, expected, atol=1e-14)

    def test_vacuum_is_dark(self, basis2):
        ops = bare_operators(basis2)
        vac = _pure(basis2, 0, DickeLabel.T_MINUS)
        assert np.max(np.abs(dissipator(ops.a, vac))) == 0.0

    def test_shape_mismatch(self, basis2):
        with pytest.raises(ValueError):
            dissipator(np.eye(3), np.eye(4))

    @given(seed=st.integers(0, 2**32 - 1), channel=st.sampled_from(["a", "sigma1", "sigma2"]))
    def test_traceless_on_hermitian_states(self, basis2, seed, channel):
        rng = np.random.default_rng(seed)
        raw = rng.normal(size=(basis2.dim, basis2.dim)) + 1j * rng.normal(
            size=(basis2.dim, basis2.dim)
        )
        rho = raw + raw.conj().T
        op = getattr(bare_operators(basis2), channel)
        assert abs(np.trace(dissipator(op, rho))) < 1e-12 * np.abs(rho).max()


class TestGenerator:
    def test_closed_system_spectrum_is_bohr_frequencies(self):
        basis = build_basis(2)
        params = SystemParams(omega0=6.0, delta=0.3, g=1.1, gamma_a=0.0, gamma_sigma=0.0)
        gen = build_generator(params, basis)
        eig = np.linalg.eigvals(gen)
        assert np.max(np.abs(eig.real)) < 1e-10
        energies = np.linalg.eigvalsh(build_hamiltonian(params, basis))
        expected = np.array([1j * (eb - ea) for ea in energies for eb in energies])
        assert assignment_distance(eig, expected) < 1e-8

    def test_stationary_state_and_conjugation_symmetry(self, basis2, params):
        gen = build_generator(params, basis2)
        eig = np.linalg.eigvals(gen)
        assert np.min(np.abs(eig)) < 1e-10
        assert assignment_distance(eig, eig.conj()) < 1e-8

    def test_generator_matches_finite_difference(self, basis2, params):
        gen = build_generator(params, basis2)
        rho = _pure(basis2, 0, DickeLabel.T_PLUS)
        t = np.linspace(0.0, 2e-6, 3)
        traj = evolve(rho, params, basis2, t)
        deriv = (traj[2] - traj[0]).reshape(-1) / (t[2] - t[0])
        assert np.allclose(deriv, gen @ traj[1].reshape(-1), atol=1e-6)


class TestEvolve:
    def test_pure_cavity_decay(self):
        basis = build_basis(1)
        params = SystemParams(omega0=8.0, delta=0.0, g=0.0, gamma_a=0.5, gamma_sigma=0.0)
        ops = bare_operators(basis)
        t = np.linspace(0.0, 10.0, 41)
        traj = evolve(_pure(basis, 1, DickeLabel.T_MINUS), params, basis, t)
        photons = np.array(
            [expectation(r, ops.a.conj().T @ ops.a).real for r in traj]
        )
        assert np.max(np.abs(photons - np.exp(-0.5 * t))) < 1e-8

    def test_independent_emitter_decay(self):
        basis = build_basis(0)
        params = SystemParams(omega0=8.0, delta=0.0, g=0.0, gamma_a=0.0, gamma_sigma=0.3)
        ops = bare_operators(basis)
        t = np.linspace(0.0, 10.0, 41)
        traj = evolve(_pure(basis, 0, DickeLabel.T_PLUS), params, basis, t)
        pop1 = np.array(
            [expectation(r, ops.sigma1.conj().T @ ops.sigma1).real for r in traj]
        )
        assert np.max(np.abs(pop1 - np.exp(-0.3 * t))) < 1e-8

    def test_relaxes_to_vacuum(self, basis2):
        params = SystemParams(omega0=9.0, delta=0.0, g=1.0, gamma_a=0.4, gamma_sigma=0.3)
        t = np.linspace(0.0, 150.0, 16)
        traj = evolve(_pure(basis2, 0, DickeLabel.T_PLUS), params, basis2, t)
        vac = basis2.index_of(0, DickeLabel.T_MINUS)
        assert traj[-1][vac, vac].real > 1 - 1e-6

    def test_trajectory_invariants(self, basis2, params):
        t = np.linspace(0.0, 15.0, 61)
        traj = evolve(_pure(basis2, 1, DickeLabel.T_MINUS), params, basis2, t)
        assert np.max(np.abs(np.einsum("tii->t", traj) - 1)) < 1e-10
        assert max(np.max(np.abs(r - r.conj().T)) for r in traj) < 1e-12
        assert min(
            np.linalg.eigvalsh((r + r.conj().T) / 2).min() for r in traj
        ) > -1e-8
        number = bare_operators(basis2).number
        exp_n = np.einsum("tij,ji->t", traj, number).real
        assert np.max(np.diff(exp_n)) <= 1e-12

    def test_singlet_isolated_without_emitter_decay(self, basis2):
        params = SystemParams(omega0=9.0, delta=0.0, g=1.0, gamma_a=0.5, gamma_sigma=0.0)
        t = np.linspace(0.0, 25.0, 101)
        traj = evolve(_pure(basis2, 0, DickeLabel.T_PLUS), params, basis2, t)
        singlets = [basis2.index_of(p, DickeLabel.SINGLET) for p in range(3)]
        assert np.max(np.abs(traj[:, singlets, singlets])) < 1e-12

    def test_backends_agree(self, basis2, params):
        t = np.linspace(0.0, 5.0, 11)
        rho0 = _pure(basis2, 0, DickeLabel.T_PLUS)
        adaptive = evolve(rho0, params, basis2, t, method="adaptive")
        exact = evolve(rho0, params, basis2, t, method="expm")
        assert np.max(np.abs(adaptive - exact)) < 1e-8

    def test_grid_validation(self, basis2, params):
        rho0 = _pure(basis2, 0, DickeLabel.T_MINUS)
        with pytest.raises(ValueError):
            evolve(rho0, params, basis2, np.array([1.0, 2.0]))
        with pytest.raises(ValueError):
            evolve(rho0, params, basis2, np.array([0.0, 2.0, 1.0]))


class TestExpectation:
    def test_basic_values(self, basis2):
        ops = bare_operators(basis2)
        vac = _pure(basis2, 0, DickeLabel.T_MINUS)
        one = _pure(basis2, 1, DickeLabel.T_MINUS)
        assert expectation(vac, ops.number) == 0
        assert expectation(vac, np.eye(basis2.dim)) == pytest.approx(1)
        assert expectation(one, ops.a.conj().T @ ops.a) == pytest.approx(1)


class TestBlocks:
    def test_dimensions(self, basis3, params):
        assert regression_block(params, basis3, 1).dim == 3
        assert regression_block(params, basis3, 2).dim == 12
        assert regression_block(params, basis3, 3).dim == 16
        assert population_block(params, basis3, 0).dim == 1
        assert population_block(params, basis3, 1).dim == 9
        assert population_block(params, basis3, 2).dim == 16

    def test_truncated_manifold_rejected(self, basis2, params):
        with pytest.raises(ValueError):
            regression_block(params, basis2, 3)
        with pytest.raises(ValueError):
            population_block(params, basis2, 3)

    def test_vacuum_population_block_is_zero(self, basis2, params):
        block = population_block(params, basis2, 0)
        assert block.matrix.shape == (1, 1)
        assert np.abs(block.matrix[0, 0]) == 0.0

    def test_first_block_matches_first_manifold_lines(self, basis2):
        params = SystemParams(omega0=10.0, delta=0.5, g=1.0, gamma_a=0.7, gamma_sigma=0.2)
        lines = regression_block(params, basis2, 1).line_values()
        expected = np.array([t.value for t in transition_eigenvalues(1, params)])
        assert assignment_distance(lines, expected) < 1e-10

    def test_population_block_matches_deltas(self, basis2):
        params = SystemParams(omega0=10.0, delta=-0.5, g=1.0, gamma_a=1.3, gamma_sigma=0.4)
        for m in (1, 2):
            lines = population_block(params, basis2, m).line_values()
            expected = np.array([d.value for d in population_eigenvalues(m, params)])
            assert assignment_distance(lines, expected) < 1e-10

    def test_block_spectra_inside_full_generator(self, basis2, params):
        gen_eigs = np.linalg.eigvals(build_generator(params, basis2))
        blocks = [regression_block(params, basis2, m).eigenvalues() for m in (1, 2)]
        blocks += [population_block(params, basis2, m).eigenvalues() for m in (0, 1, 2)]
        for eigs in blocks:
            for mu in eigs:
                assert np.min(np.abs(gen_eigs - mu)) < 1e-8

    def test_raising_family_conjugate_to_lowering_blocks(self, basis2, params):
        pairs, gen = raising_coherence_generator(params, basis2)
        # sector m=1 occupies the first dim(L1)*dim(L0) slots
        n1 = basis2.manifold_dim(1) * basis2.manifold_dim(0)
        sub = gen[:n1, :n1]
        lowering = regression_block(params, basis2, 1).matrix
        assert assignment_distance(
            np.linalg.eigvals(sub), np.linalg.eigvals(lowering).conj()
        ) < 1e-10

    def test_line_convention_roundtrip(self, basis2, params):
        block = regression_block(params, basis2, 1)
        mus = block.eigenvalues()
        assert np.allclose(generator_eig_to_line(mus), 1j * mus)
