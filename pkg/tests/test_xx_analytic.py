import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quadlind import (ClosedFormError, XXChainParams, analytic_rapidities, build_P, build_xx_chain,
                      check_condition, compare_analytic_numeric, rapidities)
from quadlind.xx_analytic import match_greedy, trace_P

# closed-form values evaluated independently at 30 digits
WORKED_CLOSED_FORM = np.array([
    -0.113827211553174947649 - 0.716209909237488311001j,
    -0.278119163650449956744,
    -0.113827211553174947649 + 0.716209909237488311001j,
    -0.744226413243200147958,
])
WORKED_BETAS = [0.160288734932570510353, 0.274653072167027422849, 0.160288734932570510353]


def test_condition_examples():
    assert check_condition(XXChainParams(L=4, J=1, Gamma_1=2, Gamma_L=0.5))
    assert not check_condition(XXChainParams(L=4, J=1, Gamma_1=1, Gamma_L=2))
    assert check_condition(XXChainParams(L=4, J=2, Gamma_1=2, Gamma_L=2))
    assert check_condition(XXChainParams(L=4, J=2, Gamma_1=1, Gamma_L=1, hbar=2))


def test_worked_example(worked_xx):
    a = analytic_rapidities(worked_xx)
    assert a.kappa == pytest.approx(0.25)
    np.testing.assert_allclose(a.alphas, np.pi * np.arange(1, 4) / 4)
    np.testing.assert_allclose(a.betas, WORKED_BETAS, rtol=1e-14)
    np.testing.assert_allclose(a.lambdas, WORKED_CLOSED_FORM, atol=1e-14)
    assert a.condition_satisfied


def test_worked_example_is_off_by_finite_size(worked_xx):
    # the expressions are the long-chain limit; at L=4 they miss by ~3e-2
    d = compare_analytic_numeric(worked_xx)
    assert 2e-2 < d < 4e-2


def test_deviation_shrinks_like_inverse_square_length():
    devs = []
    for L in (10, 20, 40, 80):
        devs.append(compare_analytic_numeric(
            XXChainParams(L=L, J=1.0, h_z=0.3, Gamma_1=2.0, Gamma_L=0.5)))
    ratios = np.array(devs[:-1]) / np.array(devs[1:])
    assert np.all((ratios > 3) & (ratios < 5.5))


def test_inapplicable():
    with pytest.raises(ClosedFormError, match="closed form inapplicable"):
        analytic_rapidities(XXChainParams(L=4, J=1, Gamma_1=1, Gamma_L=2))
    with pytest.raises(ClosedFormError, match="closed form inapplicable"):
        analytic_rapidities(XXChainParams(L=4, J=0, Gamma_1=0, Gamma_L=0))


def test_divergent_beta():
    with pytest.raises(ClosedFormError, match="divergent-beta"):
        analytic_rapidities(XXChainParams(L=4, J=2, Gamma_1=2, Gamma_L=2))
    # odd L never hits sin(k pi / L) = 1
    analytic_rapidities(XXChainParams(L=5, J=2, Gamma_1=2, Gamma_L=2))


@settings(max_examples=40, deadline=None)
@given(L=st.integers(2, 40), J=st.floats(0.1, 3), g1=st.floats(0.1, 5),
       h_z=st.floats(-2, 2), hbar=st.floats(0.5, 2))
def test_trace_and_shift_properties(L, J, g1, h_z, hbar):
    gL = J ** 2 / (hbar ** 2 * g1)
    p = XXChainParams(L=L, J=J, h_z=h_z, Gamma_1=g1, Gamma_L=gL, hbar=hbar)
    try:
        a = analytic_rapidities(p)
    except ClosedFormError:
        return
    assert abs(a.lambdas.sum() - trace_P(p)) <= 1e-12 * max(1, L)
    a0 = analytic_rapidities(p.replace(h_z=0.0))
    np.testing.assert_allclose(a.lambdas, a0.lambdas - 1j * h_z / hbar, atol=1e-10)
    # at zero field the multiset is closed under conjugation
    assert match_greedy(a0.lambdas, a0.lambdas.conj())[0] <= 1e-10


def test_numeric_shift_property():
    p = XXChainParams(L=7, J=0.9, h_z=0.0, Gamma_1=1.1, Gamma_L=0.4)
    lam0 = rapidities(build_P(build_xx_chain(p))).rapidities
    lam1 = rapidities(build_P(build_xx_chain(p.replace(h_z=0.37)))).rapidities
    assert match_greedy(lam1, lam0 - 0.37j)[0] <= 1e-10


def test_greedy_matching():
    d, partner = match_greedy([0, 1, 2], [2.01, 0.02, 1.03])
    assert list(partner) == [1, 2, 0]
    assert d == pytest.approx(0.03)
    with pytest.raises(ValueError):
        match_greedy([0, 1], [0])
