import math

import numpy as np
import pytest

from kposim.dynamics import (
    EvolutionConfig,
    fidelity,
    lindblad_evolve,
    schrodinger_evolve,
)
from kposim.errors import IntegrationError, ParameterError
from kposim.fock import (
    DensityMatrix,
    FockSpace,
    StateVector,
    cat_state,
    fock_state,
    number_op,
)
from kposim.hamiltonians import (
    KpoSystemParams,
    TimeDependentHamiltonian,
    cd_modified_hamiltonian,
    kpo_hamiltonian,
    rotate_state,
)
from kposim.schedules import constant_schedule, rotation_schedule
import scipy.sparse as sp


def constant_h(space, mat):
    return TimeDependentHamiltonian(space, sp.csr_matrix(mat))


def even_parity_ground_state(params):
    """Even-parity member of the near-degenerate Kerr-pump ground doublet."""
    h = kpo_hamiltonian(params, theta=0.0)
    vals, vecs = np.linalg.eigh(h.mat)
    space = FockSpace(params.n_max)
    for idx in range(2):
        v = vecs[:, idx]
        parity = np.sum(np.abs(v[::2]) ** 2) - np.sum(np.abs(v[1::2]) ** 2)
        if parity > 0:
            return StateVector(space, v)
    raise AssertionError("no even-parity state in the ground doublet")


class TestSchrodinger:
    def test_eigenstate_phase(self):
        space = FockSpace(6)
        omega = 0.7
        h = constant_h(space, omega * np.diag(np.arange(6)).astype(complex))
        psi0 = fock_state(space, 1)
        rec = schrodinger_evolve(h, psi0, EvolutionConfig(duration=2.0, step=1e-3))
        want = np.exp(-1j * omega * 2.0) * psi0.vec
        assert np.abs(rec.final_state.vec - want).max() < 1e-9

    def test_energy_conservation(self):
        params = KpoSystemParams(p=3.0, n_max=16)
        h = cd_modified_hamiltonian(params, constant_schedule(0.2, 10.0))
        psi0 = cat_state(FockSpace(16), 1.2, "even")
        rec = schrodinger_evolve(h, psi0,
                                 EvolutionConfig(duration=10.0, step=1e-3))
        e0 = np.vdot(psi0.vec, h.apply(0.0, psi0.vec)).real
        e1 = np.vdot(rec.final_state.vec, h.apply(10.0, rec.final_state.vec)).real
        assert abs(e1 - e0) < 1e-8

    def test_norm_drift_small(self):
        params = KpoSystemParams(p=7.0, n_max=30)
        h = cd_modified_hamiltonian(params, rotation_schedule(0.6))
        psi0 = even_parity_ground_state(params)
        rec = schrodinger_evolve(h, psi0, EvolutionConfig(duration=0.6))
        assert rec.norm_drift < 1e-8

    def test_norm_blowup_raises(self):
        # step far too large for the spectral radius -> drift error
        space = FockSpace(24)
        h = constant_h(space, 50.0 * np.diag(np.arange(24)).astype(complex))
        psi = StateVector(space, np.ones(24) / math.sqrt(24))
        with pytest.raises(IntegrationError):
            schrodinger_evolve(h, psi, EvolutionConfig(duration=1.0, step=5e-3))

    def test_convergence_order_four(self):
        params = KpoSystemParams(p=2.0, n_max=10)
        h = cd_modified_hamiltonian(params, rotation_schedule(0.5))
        psi0 = cat_state(FockSpace(10), math.sqrt(2), "even")
        ref = schrodinger_evolve(
            h, psi0, EvolutionConfig(duration=0.5, method="rk_adaptive",
                                     tol=1e-13)).final_state.vec

        def err(step):
            rec = schrodinger_evolve(h, psi0,
                                     EvolutionConfig(duration=0.5, step=step))
            return np.linalg.norm(rec.final_state.vec - ref)

        ratio = err(2e-3) / err(1e-3)
        assert 10 < ratio < 24  # ~16 for a 4th-order method

    def test_cd_equivalence_invariant(self):
        # evolving under H' equals rotating the H(0)-evolved state
        params = KpoSystemParams(p=3.0, n_max=12)
        sched = rotation_schedule(0.5)
        h_cd = cd_modified_hamiltonian(params, sched)
        h_ref = cd_modified_hamiltonian(params, constant_schedule(0.0, 0.5))
        rng = np.random.default_rng(42)
        space = FockSpace(12)
        for _ in range(3):
            v = rng.normal(size=12) + 1j * rng.normal(size=12)
            psi0 = StateVector(space, v)
            cfg = EvolutionConfig(duration=0.5, step=2e-5)
            out_cd = schrodinger_evolve(h_cd, psi0, cfg).final_state
            out_ref = schrodinger_evolve(h_ref, psi0, cfg).final_state
            rotated = rotate_state(out_ref, sched.value(0.5))
            deficit = 1.0 - abs(np.vdot(rotated.vec, out_cd.vec)) ** 2
            assert deficit < 1e-6

    def test_adaptive_matches_fixed(self):
        params = KpoSystemParams(p=3.0, n_max=14)
        h = cd_modified_hamiltonian(params, rotation_schedule(0.4))
        psi0 = cat_state(FockSpace(14), math.sqrt(3), "even")
        fixed = schrodinger_evolve(h, psi0, EvolutionConfig(duration=0.4, step=5e-5))
        adaptive = schrodinger_evolve(
            h, psi0, EvolutionConfig(duration=0.4, method="rk_adaptive", tol=1e-12))
        assert np.abs(fixed.final_state.vec - adaptive.final_state.vec).max() < 1e-7

    def test_final_time_and_monotone_times(self):
        space = FockSpace(4)
        h = constant_h(space, np.diag(np.arange(4)).astype(complex))
        rec = schrodinger_evolve(h, fock_state(space, 0),
                                 EvolutionConfig(duration=0.3, step=1e-3))
        assert np.all(np.diff(rec.times) > 0)
        assert rec.times[-1] == pytest.approx(0.3, abs=1e-12)


class TestRotationFidelity:
    """Appendix-style single-KPO rotation with and without the CD term."""

    params = KpoSystemParams(p=7.0, n_max=30)

    def _run(self, xi_cd, duration):
        params = self.params.with_(xi_cd=xi_cd)
        sched = rotation_schedule(duration)
        psi0 = even_parity_ground_state(params)
        h = cd_modified_hamiltonian(params, sched)
        rec = schrodinger_evolve(h, psi0, EvolutionConfig(duration=duration))
        target = rotate_state(psi0, sched.value(duration))
        return fidelity(rec.final_state, StateVector(psi0.space, target.vec))

    def test_with_cd_unity(self):
        assert 1.0 - self._run(1.0, 0.6) < 1e-4

    def test_without_cd_degraded(self):
        assert 1.0 - self._run(0.0, 0.6) > 0.01


class TestLindblad:
    def test_closed_system_matches_schrodinger(self):
        params = KpoSystemParams(p=3.0, n_max=12, kappa=0.0, gamma_p=0.0)
        sched = rotation_schedule(0.4)
        h = cd_modified_hamiltonian(params, sched)
        psi0 = cat_state(FockSpace(12), math.sqrt(3), "even")
        pure = schrodinger_evolve(h, psi0, EvolutionConfig(duration=0.4, step=1e-4))
        mixed = lindblad_evolve(h, params, psi0.to_density(),
                                EvolutionConfig(duration=0.4, method="rk_adaptive",
                                                tol=1e-10))
        rho_pure = np.outer(pure.final_state.vec, pure.final_state.vec.conj())
        diff = mixed.final_state.mat - rho_pure
        trace_dist = 0.5 * np.abs(np.linalg.eigvalsh(diff)).sum()
        assert trace_dist < 1e-7

    def test_decay_oracle(self):
        # H = 0, kappa > 0: <n>(t) = e^{-kappa t}
        kappa = 0.3
        params = KpoSystemParams(p=0.0, n_max=4, kappa=kappa)
        space = FockSpace(4)
        h = constant_h(space, np.zeros((4, 4), dtype=complex))
        rho0 = fock_state(space, 1).to_density()
        rec = lindblad_evolve(h, params, rho0,
                              EvolutionConfig(duration=2.0, method="rk_adaptive",
                                              tol=1e-12))
        n_final = rec.final_state.expect(number_op(space)).real
        assert n_final == pytest.approx(math.exp(-kappa * 2.0), abs=1e-6)

    def test_dephasing_oracle_model_form(self):
        # H = 0, gamma_p > 0, psi0 = (|0>+|1>)/sqrt(2):
        # the no-half dissipator gives |rho01|(t) = 0.5 e^{-gamma_p t}
        gamma = 0.4
        params = KpoSystemParams(p=0.0, n_max=3, gamma_p=gamma)
        space = FockSpace(3)
        h = constant_h(space, np.zeros((3, 3), dtype=complex))
        plus = StateVector(space, np.array([1, 1, 0]) / math.sqrt(2))
        rec = lindblad_evolve(h, params, plus.to_density(),
                              EvolutionConfig(duration=1.5, method="rk_adaptive",
                                              tol=1e-12))
        assert abs(rec.final_state.mat[0, 1]) == pytest.approx(
            0.5 * math.exp(-gamma * 1.5), abs=1e-6)

    def test_dephasing_oracle_half_form(self):
        gamma = 0.4
        params = KpoSystemParams(p=0.0, n_max=3, gamma_p=gamma)
        space = FockSpace(3)
        h = constant_h(space, np.zeros((3, 3), dtype=complex))
        plus = StateVector(space, np.array([1, 1, 0]) / math.sqrt(2))
        rec = lindblad_evolve(h, params, plus.to_density(),
                              EvolutionConfig(duration=1.5, method="rk_adaptive",
                                              tol=1e-12),
                              dephasing_half=True)
        assert abs(rec.final_state.mat[0, 1]) == pytest.approx(
            0.5 * math.exp(-gamma * 1.5 / 2.0), abs=1e-6)

    def test_trace_preserved_two_mode(self):
        params = KpoSystemParams(p=2.0, j=0.2, n_max=6, kappa=1e-3, gamma_p=1e-3)
        from kposim.hamiltonians import two_kpo_hamiltonian
        from kposim.schedules import gate_phase_schedule
        h = two_kpo_hamiltonian(params, gate_phase_schedule(0.5, 0.1))
        space = FockSpace(6, 2)
        rho0 = fock_state(space, 0, 0).to_density()
        rec = lindblad_evolve(h, params, rho0,
                              EvolutionConfig(duration=0.5, method="rk_adaptive",
                                              tol=1e-8))
        assert rec.extras["trace_drift"] < 1e-8
        assert rec.extras["min_eigenvalue"] > -1e-6


class TestFidelity:
    space = FockSpace(5)

    def test_self(self):
        psi = cat_state(self.space, 1.0, "even")
        assert fidelity(psi, psi) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal(self):
        assert fidelity(fock_state(self.space, 0), fock_state(self.space, 1)) == 0.0

    def test_maximally_mixed(self):
        rho = DensityMatrix(self.space, np.eye(5) / 5.0)
        psi = fock_state(self.space, 2)
        assert fidelity(rho, psi) == pytest.approx(0.2, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ParameterError):
            fidelity(fock_state(self.space, 0), fock_state(FockSpace(6), 0))


class TestConfig:
    def test_step_must_divide(self):
        with pytest.raises(ParameterError):
            EvolutionConfig(duration=1.0, step=3e-4)

    def test_adaptive_tol_range(self):
        with pytest.raises(ParameterError):
            EvolutionConfig(duration=1.0, method="rk_adaptive", tol=1e-4)
        with pytest.raises(ParameterError):
            EvolutionConfig(duration=1.0, method="rk_adaptive", tol=1e-15)
