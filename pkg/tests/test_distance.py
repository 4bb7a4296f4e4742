import numpy as np
import pytest

import qpathdist as qd
from qpathdist.distance import defect_trace, distance_path
from qpathdist.dynamics import coherent_path_derivatives
from qpathdist.models import quartic_integrand

from conftest import random_hermitian, random_unit


class TestStateNorms:
    def test_vector_norm_cases(self):
        a = np.array([1.0, 0.0], dtype=complex)
        b = np.array([0.0, 1.0], dtype=complex)
        assert qd.dist_vector(a, a) == 0.0
        assert qd.dist_vector(a, b) == pytest.approx(np.sqrt(2), abs=1e-15)
        assert qd.dist_vector(a, np.exp(-1j * np.pi) * a) == \
            pytest.approx(2.0, abs=1e-12)

    def test_ray_norm_cases(self):
        rng = np.random.default_rng(0)
        a = random_unit(rng, 5)
        for alpha in (0.0, 0.7, np.pi, 5.0):
            assert qd.dist_ray(a, np.exp(1j * alpha) * a) <= 1e-7
        b = np.zeros(5, dtype=complex)
        idx = int(np.argmin(np.abs(a)))
        b[idx] = 1.0
        b = b - np.vdot(a, b) * a
        b /= np.linalg.norm(b)
        assert qd.dist_ray(a, b) == pytest.approx(np.sqrt(2), abs=1e-12)

    def test_ray_half_overlap(self):
        a = np.array([1.0, 0.0], dtype=complex)
        b = np.array([0.5, np.sqrt(3) / 2], dtype=complex)
        assert qd.dist_ray(a, b) == pytest.approx(1.0, abs=1e-12)

    def test_operator_norm_cases(self):
        a = np.array([1.0, 0.0], dtype=complex)
        b = np.array([0.0, 1.0], dtype=complex)
        assert qd.dist_operator(a, 1j * a) == pytest.approx(0.0, abs=1e-12)
        assert qd.dist_operator(a, b) == pytest.approx(1.0, abs=1e-12)
        c = np.array([0.5, np.sqrt(3) / 2], dtype=complex)
        assert qd.dist_operator(a, c) == pytest.approx(np.sqrt(3) / 2, abs=1e-12)

    def test_non_unit_rejected(self):
        a = np.array([2.0, 0.0], dtype=complex)
        b = np.array([0.0, 1.0], dtype=complex)
        for fn in (qd.dist_vector, qd.dist_ray, qd.dist_operator):
            with pytest.raises(ValueError, match="unit"):
                fn(a, b)

    def test_norm_chain_inequalities(self):
        rng = np.random.default_rng(1)
        for dim in (2, 3, 16):
            for _ in range(1000):
                a = random_unit(rng, dim)
                b = random_unit(rng, dim)
                d_v = qd.dist_vector(a, b)
                d_r = qd.dist_ray(a, b)
                d_o = qd.dist_operator(a, b)
                assert -1e-12 <= d_o <= d_r + 1e-12
                assert d_r <= d_o + d_o * d_o + 1e-12
                assert d_r <= d_v + 1e-12

    def test_ray_and_operator_norms_agree_for_nearby_rays(self):
        # The two norms induce one topology and coincide to second order,
        # so their gap shrinks quadratically with separation.
        rng = np.random.default_rng(3)
        for _ in range(200):
            dim = int(rng.integers(2, 8))
            a = random_unit(rng, dim)
            tangent = random_unit(rng, dim)
            eps = 10.0 ** rng.uniform(-6, -2)
            b = a + eps * tangent
            b /= np.linalg.norm(b)
            d_r = qd.dist_ray(a, b)
            d_o = qd.dist_operator(a, b)
            assert abs(d_r - d_o) <= d_r ** 2 + 1e-12

    def test_ray_metric_axioms(self):
        rng = np.random.default_rng(2)
        for _ in range(1000):
            dim = int(rng.integers(2, 6))
            a, b, c = (random_unit(rng, dim) for _ in range(3))
            assert qd.dist_ray(a, b) == qd.dist_ray(b, a)
            assert qd.dist_ray(a, c) <= qd.dist_ray(a, b) + qd.dist_ray(b, c) \
                + 1e-12


class TestPointwiseDefect:
    def test_true_stationary_solution(self):
        rng = np.random.default_rng(3)
        h = random_hermitian(rng, 6)
        dec = qd.hermitian_eigen(h)
        psi = dec.vectors[:, 2].copy()
        lam = dec.values[2]
        norm, alpha = qd.pointwise_defect(psi, -1j * lam * psi, h)
        assert norm <= 1e-12
        assert alpha == pytest.approx(0.0, abs=1e-10)

    def test_frozen_state_gives_energy_spread(self):
        rng = np.random.default_rng(4)
        h = random_hermitian(rng, 8)
        psi = random_unit(rng, 8)
        norm, alpha = qd.pointwise_defect(psi, np.zeros(8, dtype=complex), h)
        mean = np.vdot(psi, h @ psi).real
        spread = np.sqrt(np.vdot(h @ psi, h @ psi).real - mean ** 2)
        assert norm == pytest.approx(spread, abs=1e-12)
        assert alpha == pytest.approx(-mean, abs=1e-12)

    def test_closed_form_beats_grid_scan(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            dim = int(rng.integers(2, 10))
            h = random_hermitian(rng, dim)
            psi = random_unit(rng, dim)
            psi_dot = rng.normal(size=dim) + 1j * rng.normal(size=dim)
            norm, alpha = qd.pointwise_defect(psi, psi_dot, h)
            u = 1j * psi_dot - h @ psi
            for a in alpha + np.linspace(-1.0, 1.0, 41):
                trial = np.linalg.norm(u - a * psi)
                assert norm <= trial + 1e-10


class TestReducedDefect:
    def test_harmonic_vanishes_everywhere(self, ctx64, osc_ground64):
        model = qd.harmonic_model()
        rng = np.random.default_rng(6)
        for _ in range(25):
            p, q = rng.uniform(-1.5, 1.5, 2)
            norm, _ = qd.pointwise_defect_reduced(
                ctx64, osc_ground64.vector, (p, q, -q, p), model)
            assert norm <= 1e-12

    def test_quartic_closed_form(self, quartic_prep):
        model = qd.quartic_model()
        ctx, fid, moments = (quartic_prep.ctx, quartic_prep.fiducial,
                             quartic_prep.moments)
        rng = np.random.default_rng(7)
        for _ in range(25):
            p, q = rng.uniform(-1.0, 1.0, 2)
            norm, _ = qd.pointwise_defect_reduced(
                ctx, fid.vector, (p, q, -q ** 3, p), model)
            assert norm == pytest.approx(quartic_integrand(p, q, moments),
                                         rel=1e-9, abs=1e-12)

    def test_quartic_origin_node_vanishes(self, quartic_prep):
        model = qd.quartic_model()
        norm, _ = qd.pointwise_defect_reduced(
            quartic_prep.ctx, quartic_prep.fiducial.vector,
            (0.7, 0.0, 0.0, 0.7), model)
        assert norm <= 1e-12

    def test_route_equivalence_on_lifted_paths(self, quartic_prep,
                                               ctx64, osc_ground64):
        # Generic defect with chain-rule derivatives against the reduced
        # operator-variance form, nodewise, for both wired models.
        cases = [
            (qd.harmonic_model(), ctx64, osc_ground64.vector, (0.0, 1.0)),
            (qd.quartic_model(), quartic_prep.ctx,
             quartic_prep.fiducial.vector, (0.0, 1.0)),
        ]
        for model, ctx, eta, (p0, q0) in cases:
            grid = qd.TimeGrid(0.0, 3.0, 150)
            cpath = qd.integrate_hamilton(model, p0, q0, grid)
            path = qd.lift_to_coherent_path(ctx, model, cpath, eta)
            h = model.build_hamiltonian(ctx)
            generic, _ = defect_trace(path.states,
                                      coherent_path_derivatives(path), h)
            reduced = distance_path(path, h).integrand_trace
            assert np.max(np.abs(generic - reduced)) <= 1e-9

    def test_requires_operator_polynomial(self, ctx64, osc_ground64):
        model = qd.ModelSpec(name="matrix-only")
        with pytest.raises(ValueError, match="polynomial"):
            qd.pointwise_defect_reduced(ctx64, osc_ground64.vector,
                                        (0.0, 0.0, 0.0, 0.0), model)


class TestDistancePath:
    def test_schrodinger_path_scores_zero(self, quartic_prep):
        ctx, fid = quartic_prep.ctx, quartic_prep.fiducial
        h = qd.quartic_model().build_hamiltonian(ctx)
        psi0 = qd.coherent_state(ctx, fid.vector, 0.0, 1.0)
        path = qd.propagate_schrodinger(h, psi0, qd.TimeGrid(0.0, 5.0, 200))
        report = distance_path(path, h)
        assert report.value <= 1e-8
        assert np.max(report.integrand_trace) <= 1e-9

    def test_schrodinger_path_small_by_finite_differences(self, quartic_prep):
        # Independent of the analytic-derivative shortcut: rebuild the same
        # states under the finite-difference policy.
        ctx, fid = quartic_prep.ctx, quartic_prep.fiducial
        h = qd.quartic_model().build_hamiltonian(ctx)
        psi0 = qd.coherent_state(ctx, fid.vector, 0.0, 1.0)
        grid = qd.TimeGrid(0.0, 2.0, 1600)
        path = qd.propagate_schrodinger(h, psi0, grid)
        fd_path = qd.StatePath(grid=grid, states=path.states,
                               policy="finite_difference")
        assert distance_path(fd_path, h).value <= 1e-4

    def test_harmonic_classical_path_scores_zero(self, ctx64, osc_ground64):
        model = qd.harmonic_model()
        grid = qd.TimeGrid(0.0, 2 * np.pi, 400)
        cpath = qd.integrate_hamilton(model, 0.0, 1.0, grid)
        path = qd.lift_to_coherent_path(ctx64, model, cpath, osc_ground64.vector)
        assert distance_path(path, model.build_hamiltonian(ctx64)).value <= 1e-8

    def test_additivity_at_shared_nodes(self, quartic_prep):
        model = qd.quartic_model()
        ctx, fid = quartic_prep.ctx, quartic_prep.fiducial
        grid = qd.TimeGrid(0.0, 8.0, 160)
        cpath = qd.integrate_hamilton(model, 0.0, 1.0, grid)
        path = qd.lift_to_coherent_path(ctx, model, cpath, fid.vector)
        report = distance_path(path, model.build_hamiltonian(ctx))
        mid = grid.n // 2
        assert report.segment(0, mid) + report.segment(mid, grid.n) == \
            pytest.approx(report.value, abs=1e-12)

    def test_value_is_quadrature_of_trace(self, ctx64, osc_ground64):
        from qpathdist.quadrature import simpson_value

        model = qd.harmonic_model()
        grid = qd.TimeGrid(0.0, 1.0, 40)
        cpath = qd.integrate_hamilton(model, 0.3, 0.4, grid)
        path = qd.lift_to_coherent_path(ctx64, model, cpath, osc_ground64.vector)
        report = distance_path(path, model.build_hamiltonian(ctx64))
        assert report.value == simpson_value(report.integrand_trace, grid)

    def test_fd_policy_needs_enough_nodes(self):
        grid = qd.TimeGrid(0.0, 1.0, 2)
        states = np.zeros((3, 2), dtype=complex)
        states[:, 0] = 1.0
        path = qd.StatePath(grid=grid, states=states, policy="finite_difference")
        with pytest.raises(ValueError, match="n >= 4"):
            distance_path(path, np.eye(2, dtype=complex))

    def test_grid_refinement_within_error_estimate(self, quartic_prep):
        # Pure quadrature comparison: both grids sample one finely integrated
        # trajectory on a window where the integrand stays smooth (no q = 0
        # crossing), so the Richardson estimate must bound the change.
        from qpathdist.dynamics import ClassicalPath

        model = qd.quartic_model()
        ctx, fid = quartic_prep.ctx, quartic_prep.fiducial
        fine_grid = qd.TimeGrid(0.0, 1.5, 8000)
        fine = qd.integrate_hamilton(model, 0.0, 1.0, fine_grid)

        def subsample(n):
            stride = fine_grid.n // n
            grid = qd.TimeGrid(0.0, 1.5, n)
            cpath = ClassicalPath(grid=grid, p=fine.p[::stride].copy(),
                                  q=fine.q[::stride].copy(),
                                  p_dot=fine.p_dot[::stride].copy(),
                                  q_dot=fine.q_dot[::stride].copy())
            path = qd.lift_to_coherent_path(ctx, model, cpath, fid.vector)
            return distance_path(path, model.build_hamiltonian(ctx))

        coarse_report = subsample(80)
        fine_report = subsample(160)
        assert abs(fine_report.value - coarse_report.value) \
            <= coarse_report.error_estimate


class TestConcurrentUse:
    def test_parallel_calls_match_serial(self, quartic_prep):
        # Everything downstream of construction is pure; concurrent
        # evaluation over one shared context must reproduce serial results.
        from concurrent.futures import ThreadPoolExecutor

        model = qd.quartic_model()
        ctx, fid = quartic_prep.ctx, quartic_prep.fiducial
        h = model.build_hamiltonian(ctx)
        grid = qd.TimeGrid(0.0, 3.0, 100)

        def run(q0):
            cpath = qd.integrate_hamilton(model, 0.0, q0, grid)
            path = qd.lift_to_coherent_path(ctx, model, cpath, fid.vector)
            return distance_path(path, h).value

        q0s = [0.6, 0.8, 1.0, 1.2]
        serial = [run(q) for q in q0s]
        with ThreadPoolExecutor(max_workers=4) as pool:
            parallel = list(pool.map(run, q0s))
        assert serial == parallel


class TestHbarScan:
    def test_quartic_strictly_decreasing(self):
        grid = qd.TimeGrid(0.0, 5.0, 500)
        res = qd.hbar_scan(qd.quartic_model(), [1.0, 0.5, 0.25, 0.125],
                           0.0, 1.0, grid, dim=64)
        vals = res.values()
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert res.monotone

    def test_harmonic_all_zero(self):
        grid = qd.TimeGrid(0.0, 2 * np.pi, 200)
        res = qd.hbar_scan(qd.harmonic_model(), [1.0, 0.5, 0.25, 0.125],
                           0.0, 1.0, grid, dim=32)
        assert all(v <= 1e-10 for v in res.values())
        assert res.monotone

    def test_larger_excursion_scores_larger(self):
        grid = qd.TimeGrid(0.0, 5.0, 400)
        small = qd.hbar_scan(qd.quartic_model(), [0.5], 0.0, 1.0, grid, dim=64)
        large = qd.hbar_scan(qd.quartic_model(), [0.5], 0.0, 1.3, grid, dim=64)
        assert large.values()[0] > small.values()[0]

    def test_empty_list_rejected(self):
        grid = qd.TimeGrid(0.0, 1.0, 10)
        with pytest.raises(ValueError, match="empty"):
            qd.hbar_scan(qd.quartic_model(), [], 0.0, 1.0, grid)
