import numpy as np
import pytest

import qpathdist as qd
from qpathdist.dynamics import (ModelSpec, StatePath, coherent_path_derivatives,
                                path_time_derivatives)
from qpathdist.errors import NumericalGateError


class TestClassicalHamiltonian:
    def test_ground_energy_at_origin(self, ctx64, osc_ground64):
        h = qd.harmonic_model().build_hamiltonian(ctx64)
        val = qd.classical_hamiltonian(ctx64, h, osc_ground64.vector, 0.0, 0.0)
        assert val == pytest.approx(0.5, abs=1e-12)

    def test_displaced_energy(self, ctx128, osc_ground128):
        h = qd.harmonic_model().build_hamiltonian(ctx128)
        val = qd.classical_hamiltonian(ctx128, h, osc_ground128.vector, 1.0, 1.0)
        assert val == pytest.approx(1.5, abs=1e-10)

    def test_labeling_property_for_q(self, ctx128, osc_ground128):
        val = qd.classical_hamiltonian(ctx128, ctx128.q_op,
                                       osc_ground128.vector, 0.0, 3.0)
        assert val == pytest.approx(3.0, abs=1e-9)


class TestIntegrateHamilton:
    def test_harmonic_half_turn(self):
        grid = qd.TimeGrid(0.0, np.pi, 200)
        path = qd.integrate_hamilton(qd.harmonic_model(), 0.0, 1.0, grid)
        assert path.p[-1] == pytest.approx(0.0, abs=1e-8)
        assert path.q[-1] == pytest.approx(-1.0, abs=1e-8)

    def test_quartic_energy_conservation(self):
        grid = qd.TimeGrid(0.0, 10.0, 4000)
        path = qd.integrate_hamilton(qd.quartic_model(), 0.0, 1.0, grid)
        energy = 0.5 * path.p ** 2 + 0.25 * path.q ** 4
        assert np.max(np.abs(energy - energy[0])) <= 1e-8 * energy[0]

    def test_fixed_point(self):
        model = ModelSpec(name="frozen", classical_rhs=lambda p, q: (0.0, 0.0))
        grid = qd.TimeGrid(0.0, 1.0, 10)
        path = qd.integrate_hamilton(model, 0.3, -0.4, grid)
        assert np.all(path.p == 0.3)
        assert np.all(path.q == -0.4)
        assert np.all(path.p_dot == 0.0)

    def test_rk4_order(self):
        model = qd.harmonic_model()

        def endpoint_error(n):
            grid = qd.TimeGrid(0.0, np.pi, n)
            path = qd.integrate_hamilton(model, 0.0, 1.0, grid)
            return np.hypot(path.p[-1], path.q[-1] + 1.0)

        # Halving the step must shrink the error by at least a factor 12.
        assert endpoint_error(50) / endpoint_error(100) >= 12.0

    def test_stored_rates_match_rhs(self):
        grid = qd.TimeGrid(0.0, 3.0, 60)
        path = qd.integrate_hamilton(qd.quartic_model(), 0.2, 0.9, grid)
        assert np.max(np.abs(path.p_dot + path.q ** 3)) <= 1e-12
        assert np.max(np.abs(path.q_dot - path.p)) <= 1e-12

    def test_blowup_reported_with_time(self):
        model = ModelSpec(name="explosive",
                          classical_rhs=lambda p, q: (p * p + 1.0, 0.0))
        grid = qd.TimeGrid(0.0, 4.0, 400)
        with pytest.raises(NumericalGateError, match="blew up at t"):
            qd.integrate_hamilton(model, 1.0, 0.0, grid)


class TestLiftToCoherentPath:
    def test_constant_origin_path(self, ctx64, osc_ground64):
        model = ModelSpec(name="frozen", classical_rhs=lambda p, q: (0.0, 0.0))
        grid = qd.TimeGrid(0.0, 1.0, 8)
        cpath = qd.integrate_hamilton(model, 0.0, 0.0, grid)
        path = qd.lift_to_coherent_path(ctx64, model, cpath, osc_ground64.vector)
        assert np.max(np.abs(path.states - osc_ground64.vector)) == 0.0

    def test_position_expectation_traces_cosine(self, ctx128, osc_ground128):
        model = qd.harmonic_model()
        grid = qd.TimeGrid(0.0, 2 * np.pi, 800)
        cpath = qd.integrate_hamilton(model, 0.0, 1.0, grid)
        path = qd.lift_to_coherent_path(ctx128, model, cpath,
                                        osc_ground128.vector)
        qs = np.einsum("ij,jk,ik->i", path.states.conj(), ctx128.q_op,
                       path.states).real
        assert np.max(np.abs(qs - np.cos(grid.times()))) <= 1e-8

    def test_nodewise_unit_norm(self, ctx64, osc_ground64):
        model = qd.harmonic_model()
        grid = qd.TimeGrid(0.0, 1.0, 20)
        cpath = qd.integrate_hamilton(model, 0.0, 1.0, grid)
        path = qd.lift_to_coherent_path(ctx64, model, cpath, osc_ground64.vector)
        assert np.max(np.abs(np.linalg.norm(path.states, axis=1) - 1.0)) <= 1e-12

    def test_chain_rule_derivatives(self, ctx64, osc_ground64):
        # Analytic lifted-path derivative against a fine finite difference.
        model = qd.harmonic_model()
        grid = qd.TimeGrid(0.0, 1.0, 256)
        cpath = qd.integrate_hamilton(model, 0.0, 1.0, grid)
        path = qd.lift_to_coherent_path(ctx64, model, cpath, osc_ground64.vector)
        derivs = coherent_path_derivatives(path)
        fd = path_time_derivatives(path.states, grid.spacing)
        interior = slice(2, -2)
        assert np.max(np.abs(derivs[interior] - fd[interior])) <= 1e-7


class TestPropagateSchrodinger:
    def test_eigenstate_is_stationary(self, ctx64):
        h = qd.harmonic_model().build_hamiltonian(ctx64)
        dec = qd.hermitian_eigen(h)
        psi0 = dec.vectors[:, 3].copy()
        grid = qd.TimeGrid(0.0, 5.0, 50)
        path = qd.propagate_schrodinger(h, psi0, grid)
        for state in path.states[::10]:
            proj = np.outer(state, state.conj())
            assert np.max(np.abs(proj - np.outer(psi0, psi0.conj()))) <= 1e-10

    def test_norm_preserved(self, ctx64, osc_ground64):
        h = qd.quartic_model().build_hamiltonian(ctx64)
        psi0 = qd.coherent_state(ctx64, osc_ground64.vector, 0.0, 1.0)
        grid = qd.TimeGrid(0.0, 4.0, 80)
        path = qd.propagate_schrodinger(h, psi0, grid)
        assert np.max(np.abs(np.linalg.norm(path.states, axis=1) - 1.0)) <= 1e-12

    def test_ehrenfest_for_harmonic(self, ctx128, osc_ground128):
        h = qd.harmonic_model().build_hamiltonian(ctx128)
        p0, q0 = 1.0, 0.5
        psi0 = qd.coherent_state(ctx128, osc_ground128.vector, p0, q0)
        grid = qd.TimeGrid(0.0, 2 * np.pi, 120)
        path = qd.propagate_schrodinger(h, psi0, grid)
        ts = grid.times()
        qs = np.einsum("ij,jk,ik->i", path.states.conj(), ctx128.q_op,
                       path.states).real
        assert np.max(np.abs(qs - (q0 * np.cos(ts) + p0 * np.sin(ts)))) <= 1e-8


class TestExpectationFlow:
    def test_quartic_gradient_carries_hbar_correction(self, quartic_prep):
        # d<H>/dq = q^3 + 3 q <Q^2>: the expectation flow differs from the
        # bare symbol by exactly the moment term.
        model = qd.quartic_model()
        ctx, fid, moments = (quartic_prep.ctx, quartic_prep.fiducial,
                             quartic_prep.moments)
        h = model.build_hamiltonian(ctx)
        rhs = qd.expectation_rhs(ctx, h, fid.vector)
        q = 0.8
        p_dot, q_dot = rhs(0.3, q)
        assert q_dot == pytest.approx(0.3, abs=1e-7)
        assert p_dot == pytest.approx(-(q ** 3 + 3 * q * moments[2]), abs=1e-6)


class TestStatePath:
    def test_rejects_non_unit_rows(self):
        grid = qd.TimeGrid(0.0, 1.0, 4)
        states = np.ones((5, 3), dtype=complex)
        with pytest.raises(ValueError, match="unit norm"):
            StatePath(grid=grid, states=states, policy="finite_difference")

    def test_rejects_unknown_policy(self):
        grid = qd.TimeGrid(0.0, 1.0, 4)
        states = np.zeros((5, 3), dtype=complex)
        states[:, 0] = 1.0
        with pytest.raises(ValueError, match="policy"):
            StatePath(grid=grid, states=states, policy="guesswork")

    def test_fd_derivative_accuracy(self):
        grid = qd.TimeGrid(0.0, 1.0, 200)
        ts = grid.times()
        states = np.stack([np.array([np.cos(t), np.sin(t)]) for t in ts])
        derivs = path_time_derivatives(states.astype(complex), grid.spacing)
        exact = np.stack([np.array([-np.sin(t), np.cos(t)]) for t in ts])
        assert np.max(np.abs(derivs[2:-2] - exact[2:-2])) <= 1e-9
        assert np.max(np.abs(derivs - exact)) <= 1e-4
