"""Backend agreement and correctness of the pair-minimisation kernel."""

import subprocess
import sys

import numpy as np
import pytest

from qpathdist import _pairmin_py, kernels


def random_gram_batch(rng, n):
    """Gram data from genuine random states so the constraints hold."""
    nu1 = np.empty(n)
    nu2 = np.empty(n)
    r1 = np.empty(n)
    r2 = np.empty(n)
    gpp = np.empty(n, dtype=complex)
    guu = np.empty(n, dtype=complex)
    gup = np.empty(n, dtype=complex)
    gpu = np.empty(n, dtype=complex)
    for k in range(n):
        dim = int(rng.integers(2, 7))
        psi1 = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        psi2 = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        psi1 /= np.linalg.norm(psi1)
        psi2 /= np.linalg.norm(psi2)
        u1 = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        u2 = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        nu1[k] = np.vdot(u1, u1).real
        nu2[k] = np.vdot(u2, u2).real
        r1[k] = np.vdot(psi1, u1).real
        r2[k] = np.vdot(psi2, u2).real
        gpp[k] = np.vdot(psi1, psi2)
        guu[k] = np.vdot(u1, u2)
        gup[k] = np.vdot(u1, psi2)
        gpu[k] = np.vdot(psi1, u2)
    return nu1, nu2, r1, r2, gpp, guu, gup, gpu


def test_backends_agree():
    rng = np.random.default_rng(11)
    gram = random_gram_batch(rng, 200)
    py = kernels.pair_joint_minimize(*gram, impl=_pairmin_py)
    active = kernels.pair_joint_minimize(*gram)
    # Minima agree to roundoff; the minimisers only to the gamma search
    # tolerance (libm and math.cos can differ in the last ulp, which moves
    # the final golden-section bracket within its own width).
    assert np.max(np.abs(py[0] - active[0])) <= 1e-12
    for a, b in zip(py[1:], active[1:]):
        assert np.max(np.abs(np.asarray(a, dtype=float)
                             - np.asarray(b, dtype=float))) <= 1e-8


@pytest.mark.skipif(kernels.BACKEND != "compiled",
                    reason="compiled backend not built")
def test_compiled_backend_selected_by_default():
    assert kernels.BACKEND == "compiled"


def test_env_var_forces_pure_backend():
    out = subprocess.run(
        [sys.executable, "-c",
         "from qpathdist import kernels; print(kernels.BACKEND)"],
        env={"QPATHDIST_PURE": "1", "PATH": "/usr/bin:/bin"},
        capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_gamma_in_principal_range():
    rng = np.random.default_rng(12)
    gram = random_gram_batch(rng, 100)
    _, _, _, gamma, _ = kernels.pair_joint_minimize(*gram)
    assert np.all(gamma >= 0.0)
    assert np.all(gamma < 2 * np.pi)


def test_matches_dense_gamma_scan():
    # The kernel's refined optimum must never lose to a dense 1-d scan over
    # gamma with the exact inner (a1, a2) solve.
    rng = np.random.default_rng(13)
    gram = random_gram_batch(rng, 50)
    vals, _, _, _, _ = kernels.pair_joint_minimize(*gram)
    nu1, nu2, r1, r2, gpp, guu, gup, gpu = gram
    for k in range(50):
        best = np.inf
        for gamma in np.linspace(0, 2 * np.pi, 4096, endpoint=False):
            f, _, _, _ = _pairmin_py._eval_gamma(
                gamma, nu1[k], nu2[k], r1[k], r2[k],
                gpp[k].real, gpp[k].imag, guu[k].real, guu[k].imag,
                gup[k].real, gup[k].imag, gpu[k].real, gpu[k].imag)
            best = min(best, f)
        assert vals[k] <= np.sqrt(max(best, 0.0)) + 1e-9


def test_singular_branch_at_aligned_phase():
    # <psi1|psi2> = 1 and gamma = 0: det = 1 - m^2 = 0, so the evaluation
    # must switch to the one-parameter reduction and return its closed form.
    rng = np.random.default_rng(21)
    dim = 5
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    psi /= np.linalg.norm(psi)
    u1 = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    u2 = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    f, a, b, degenerate = _pairmin_py._eval_gamma(
        0.0, np.vdot(u1, u1).real, np.vdot(u2, u2).real,
        np.vdot(psi, u1).real, np.vdot(psi, u2).real,
        1.0, 0.0,
        np.vdot(u1, u2).real, np.vdot(u1, u2).imag,
        np.vdot(u1, psi).real, np.vdot(u1, psi).imag,
        np.vdot(psi, u2).real, np.vdot(psi, u2).imag)
    assert degenerate
    assert b == 0.0
    v = u1 - u2
    a_expect = np.vdot(psi, v).real
    f_expect = np.vdot(v, v).real - a_expect ** 2
    assert f == pytest.approx(f_expect, rel=1e-12)
    assert a == pytest.approx(a_expect, rel=1e-12)


def test_degenerate_parallel_states_match_brute_force():
    # psi2 = psi1 exactly: the 2x2 system is singular at the aligned phases
    # and the one-parameter fallback must still land on the true infimum.
    rng = np.random.default_rng(14)
    dim = 4
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    psi /= np.linalg.norm(psi)
    u1 = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    u2 = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    vals, _, _, _, _ = kernels.pair_joint_minimize(
        np.array([np.vdot(u1, u1).real]), np.array([np.vdot(u2, u2).real]),
        np.array([np.vdot(psi, u1).real]), np.array([np.vdot(psi, u2).real]),
        np.array([1.0 + 0.0j]), np.array([np.vdot(u1, u2)]),
        np.array([np.vdot(u1, psi)]), np.array([np.vdot(psi, u2)]))
    best = np.inf
    for a in np.linspace(-5, 5, 81):
        for b in np.linspace(-5, 5, 81):
            for g in np.linspace(0, 2 * np.pi, 81):
                val = np.linalg.norm((u1 - a * psi)
                                     - np.exp(-1j * g) * (u2 - b * psi))
                best = min(best, val)
    assert vals[0] <= best + 1e-6
    assert np.isfinite(vals[0])
