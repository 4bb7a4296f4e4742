import numpy as np
import pytest

import qpathdist as qd
from qpathdist import linalg
from qpathdist.errors import NumericalGateError

from conftest import random_hermitian, random_unit


def basis(dim, k):
    e = np.zeros(dim, dtype=complex)
    e[k] = 1.0
    return e


class TestInner:
    def test_orthonormal_basis(self):
        assert qd.inner(basis(4, 0), basis(4, 0)) == 1.0
        assert qd.inner(basis(4, 0), basis(4, 1)) == 0.0

    def test_conjugates_first_slot(self):
        assert qd.inner(1j * basis(2, 0), basis(2, 0)) == -1j

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            qd.inner(basis(2, 0), basis(3, 0))

    def test_self_inner_nonnegative(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            v = rng.normal(size=5) + 1j * rng.normal(size=5)
            val = qd.inner(v, v)
            assert val.imag == 0.0
            assert val.real >= 0.0


class TestHermitianEigen:
    def test_diagonal(self):
        dec = qd.hermitian_eigen(np.diag([3.0, 1.0, 2.0]).astype(complex))
        assert np.allclose(dec.values, [1.0, 2.0, 3.0])

    def test_symmetric_2x2(self):
        dec = qd.hermitian_eigen(np.array([[0, 1], [1, 0]], dtype=complex))
        assert np.allclose(dec.values, [-1.0, 1.0])

    def test_truncated_oscillator_ground_energy(self, ctx64):
        h = 0.5 * (ctx64.p_op @ ctx64.p_op + ctx64.q_op @ ctx64.q_op)
        dec = qd.hermitian_eigen(h)
        # Truncation leaves the low spectrum exact: the oscillator is
        # diagonal in the number basis.
        assert abs(dec.values[0] - 0.5) <= 1e-10

    def test_rejects_non_hermitian(self):
        m = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
        with pytest.raises(ValueError, match="Hermitian"):
            qd.hermitian_eigen(m)

    def test_reconstruction_random(self):
        rng = np.random.default_rng(7)
        for dim in (8, 32, 128):
            m = random_hermitian(rng, dim)
            dec = qd.hermitian_eigen(m)
            rebuilt = (dec.vectors * dec.values) @ dec.vectors.conj().T
            scale = np.linalg.norm(m)
            assert np.linalg.norm(m - rebuilt) <= 1e-10 * scale

    def test_eigenpair_residuals(self):
        rng = np.random.default_rng(17)
        m = random_hermitian(rng, 48)
        dec = qd.hermitian_eigen(m)
        scale = np.linalg.norm(m)
        assert np.all(dec.values[:-1] <= dec.values[1:])
        for k in range(48):
            residual = np.linalg.norm(m @ dec.vectors[:, k]
                                      - dec.values[k] * dec.vectors[:, k])
            assert residual <= 1e-10 * scale

    def test_orthonormal_columns(self):
        rng = np.random.default_rng(8)
        m = random_hermitian(rng, 24)
        dec = qd.hermitian_eigen(m)
        gram = dec.vectors.conj().T @ dec.vectors
        assert np.max(np.abs(gram - np.eye(24))) <= 1e-12

    def test_deterministic_phase(self):
        rng = np.random.default_rng(9)
        m = random_hermitian(rng, 12)
        d1 = qd.hermitian_eigen(m)
        d2 = qd.hermitian_eigen(m.copy())
        assert np.array_equal(d1.vectors, d2.vectors)
        # first significant component is real positive
        for k in range(12):
            col = d1.vectors[:, k]
            idx = np.argmax(np.abs(col) > 1e-12 * np.abs(col).max())
            assert col[idx].imag == pytest.approx(0.0, abs=1e-15)
            assert col[idx].real > 0


class TestExpmApply:
    def test_zero_matrix_is_identity(self):
        v = np.array([1.0, 2.0j, -0.5], dtype=complex)
        out = qd.expm_apply(np.zeros((3, 3), dtype=complex), v)
        assert np.allclose(out, v, atol=1e-15)

    def test_scalar_phase(self):
        v = np.array([0.3, -0.4j], dtype=complex)
        out = qd.expm_apply(1j * np.pi * np.eye(2), v)
        assert np.max(np.abs(out + v)) <= 1e-12

    def test_spin1_rotation_matches_coherent_column(self):
        sc = qd.build_spin(1)
        theta = 0.9
        out = qd.expm_apply(-1j * theta * sc.s2,
                            np.array([0, 1, 0], dtype=complex))
        assert np.max(np.abs(out - qd.spin1_coherent(theta, 0.0))) <= 1e-12

    def test_unitarity_random_skew(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            dim = int(rng.integers(2, 12))
            a = 1j * random_hermitian(rng, dim, scale=rng.uniform(0.1, 3.0))
            v = random_unit(rng, dim)
            out = qd.expm_apply(a, v)
            assert abs(np.linalg.norm(out) - 1.0) <= 1e-12

    def test_commuting_composition(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            d1 = np.diag(rng.normal(size=6) * 1j)
            d2 = np.diag(rng.normal(size=6) * 1j)
            v = random_unit(rng, 6)
            once = qd.expm_apply(d1 + d2, v)
            twice = qd.expm_apply(d1, qd.expm_apply(d2, v))
            assert np.max(np.abs(once - twice)) <= 1e-12

    def test_accuracy_against_eigen_route(self):
        rng = np.random.default_rng(13)
        h = random_hermitian(rng, 16)
        h *= 50.0 / np.linalg.norm(h, 1)
        v = random_unit(rng, 16)
        dec = qd.hermitian_eigen(h)
        exact = linalg.eigen_apply_exp(dec, -1j, v)
        out = qd.expm_apply(-1j * h, v)
        assert np.linalg.norm(out - exact) <= 1e-12

    def test_norm_limit_refusal(self):
        big = 1j * np.diag(np.full(4, 1e4))
        with pytest.raises(NumericalGateError, match="subdivide"):
            qd.expm_apply(big, np.ones(4, dtype=complex) / 2.0)


class TestEigenApplyExp:
    def test_matches_expm(self):
        rng = np.random.default_rng(14)
        h = random_hermitian(rng, 10)
        v = random_unit(rng, 10)
        dec = qd.hermitian_eigen(h)
        assert np.allclose(linalg.eigen_apply_exp(dec, 0.7j, v),
                           qd.expm_apply(0.7j * h, v), atol=1e-12)
