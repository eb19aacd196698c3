import numpy as np
import pytest

from quadlind import XXChainParams, build_P, build_xx_chain, random_model, rapidities, steady_state
from quadlind import oracle
from quadlind.errors import OracleSizeError
from quadlind.reports import _random_gaussian_covariance
from quadlind.spectral import match_multisets
from quadlind.steadystate import particle_current


@pytest.mark.parametrize("L", [1, 2, 3])
def test_canonical_anticommutation(L):
    a = oracle.annihilators(L)
    eye = np.eye(2 ** L)
    for i in range(L):
        for j in range(L):
            np.testing.assert_allclose(a[i] @ a[j].conj().T + a[j].conj().T @ a[i], eye * (i == j))
            np.testing.assert_allclose(a[i] @ a[j] + a[j] @ a[i], 0)


def test_single_mode_superoperator(single_mode):
    S = oracle.build_liouvillian_superoperator(single_mode)
    ev = np.sort_complex(oracle.ed_spectrum(S))
    np.testing.assert_allclose(ev, [-2, -1, -1, 0], atol=1e-14)
    pred = oracle.predicted_even_spectrum(rapidities(build_P(single_mode)))
    np.testing.assert_allclose(np.sort(pred.real), [-2, 0], atol=1e-15)
    rho, O = oracle.ed_steady_state(S)
    np.testing.assert_allclose(np.diag(rho).real, [0.25, 0.75], atol=1e-14)


@pytest.mark.parametrize("L", [1, 2, 3])
def test_structural_residuals(L, rng):
    S = oracle.build_liouvillian_superoperator(random_model(L, rng))
    assert oracle.trace_residual(S) <= 1e-12
    assert oracle.hermiticity_residual(S, rng) <= 1e-12
    assert oracle.sector_coupling(S) == 0.0


def test_sector_coupling_detects_mixing(single_mode):
    S = oracle.build_liouvillian_superoperator(single_mode)
    a = oracle.annihilators(1)[0]
    # a single fermion operator acting on one side flips the graded parity
    S.matrix[:] += np.kron(np.eye(2), a)
    assert oracle.sector_coupling(S) == 1.0


@pytest.mark.parametrize("L", [2, 3, 4])
def test_steady_state_agrees(L, rng):
    m = random_model(L, rng)
    _, O_ed = oracle.ed_steady_state(oracle.build_liouvillian_superoperator(m))
    assert np.abs(steady_state(m).O - O_ed).max() <= 1e-12


@pytest.mark.parametrize("L", [2, 3])
def test_even_sector_containment(L, rng):
    m = random_model(L, rng)
    S = oracle.build_liouvillian_superoperator(m)
    pred = oracle.predicted_even_spectrum(rapidities(build_P(m)))
    assert pred.size == 4 ** L // 2
    assert match_multisets(pred, oracle.ed_spectrum(S))[0] <= 1e-10


def test_gaussian_density_matrix_reproduces_covariance(rng):
    C = _random_gaussian_covariance(3, rng)
    rho = oracle.gaussian_density_matrix(C)
    assert np.trace(rho) == pytest.approx(1)
    assert np.linalg.eigvalsh(rho)[0] >= -1e-14
    np.testing.assert_allclose(oracle.two_point(rho, 3), C, atol=1e-14)


def test_pure_gaussian_state():
    C = np.diag([1.0, 0.0])
    rho = oracle.gaussian_density_matrix(C)
    np.testing.assert_allclose(rho @ rho, rho, atol=1e-14)


def test_ed_evolve_endpoints(rng):
    m = random_model(2, rng)
    S = oracle.build_liouvillian_superoperator(m)
    C0 = _random_gaussian_covariance(2, rng)
    out = oracle.ed_evolve(S, oracle.gaussian_density_matrix(C0), [0.0, 500.0])
    np.testing.assert_allclose(out[0], C0, atol=1e-14)
    np.testing.assert_allclose(out[1], oracle.ed_steady_state(S)[1], atol=1e-10)


def test_continuity_equation_fixes_current_sign(rng):
    p = XXChainParams(L=4, J=0.8, h_z=0.3, Gamma_1=1.0, Gamma_L=1.0, nbar_1=0.9, nbar_L=0.1)
    m = build_xx_chain(p)
    S = oracle.build_liouvillian_superoperator(m)
    rho = oracle.gaussian_density_matrix(_random_gaussian_covariance(4, rng))
    O = oracle.two_point(rho, 4)
    dO = oracle.two_point(oracle.unvec(S.matrix @ oracle.vec(rho)), 4)
    j = particle_current(O, m)
    # interior sites feel no bath: dn_l/dt = j_{l-1} - j_l
    np.testing.assert_allclose(np.diag(dO)[1:3].real, j[:-1] - j[1:], atol=1e-13)


def test_size_refusal():
    with pytest.raises(OracleSizeError, match="L=6 > L_max=5"):
        oracle.build_liouvillian_superoperator(random_model(6, 0))
    with pytest.raises(OracleSizeError):
        oracle.build_liouvillian_superoperator(random_model(3, 0), lmax=2)
