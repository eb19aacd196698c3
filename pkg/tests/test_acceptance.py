"""Acceptance gate: one check per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v -s`` or
``python tests/test_acceptance.py``.
"""
import sys
import time

import numpy as np
import pytest
import scipy.linalg as sla

from quadlind import (ModelSpec, XXChainParams, assemble_W1, build_M, build_P, build_xx_chain,
                      evolve_covariance, random_model, rapidities, similarity_log, spectral_gap,
                      steady_state, summing_rule_residual, validate_model)
from quadlind import oracle
from quadlind.dynamics import tail_decay_rate
from quadlind.reports import _random_gaussian_covariance, full_solve
from quadlind.spectral import diagonalization_residual, match_multisets, pairing_deviation
from quadlind.steadystate import lyapunov_residual
from quadlind.structure import check_M_symmetry, max_norm
from quadlind.xx_analytic import compare_analytic_numeric

CORPUS_SIZES = (2, 4, 8, 16, 32, 64)
CORPUS_PER_SIZE = 50

XX_PARAMETER_SETS = [
    dict(J=1.0, h_z=0.0, Gamma_1=2.0, Gamma_L=0.5),
    dict(J=1.0, h_z=1.0, Gamma_1=4.0, Gamma_L=0.25),
    dict(J=0.5, h_z=0.3, Gamma_1=1.0, Gamma_L=0.25),
    dict(J=2.0, h_z=-0.5, Gamma_1=1.0, Gamma_L=4.0),
    dict(J=1.5, h_z=0.7, Gamma_1=3.0, Gamma_L=0.75),
]


def _corpus():
    rng = np.random.default_rng(1001)
    for L in CORPUS_SIZES:
        for _ in range(CORPUS_PER_SIZE):
            yield random_model(L, rng)


def criterion_1():
    worst = max(pairing_deviation(rapidities(build_P(m)), build_M(m)) for m in _corpus())
    return worst <= 1e-10, f"max pairing deviation {worst:.2e} (tol 1e-10, 300 models)"


def criterion_2():
    worst = max(check_M_symmetry(build_M(m)) for m in _corpus())
    return worst <= 1e-12, f"max |Y M Y + M^dag| {worst:.2e} (tol 1e-12)"


def criterion_3():
    worst = max(summing_rule_residual(rapidities(build_P(m)), m) for m in _corpus())
    return worst <= 1e-10, f"max summing-rule residual {worst:.2e} (tol 1e-10)"


def criterion_4():
    res = herm = 0.0
    lo, hi = np.inf, -np.inf
    for m in _corpus():
        P = build_P(m)
        ss = steady_state(m, rapidities(P))
        res = max(res, lyapunov_residual(P, ss.Omega, m.lambda_plus))
        herm = max(herm, max_norm(ss.O - ss.O.conj().T))
        w = np.linalg.eigvalsh(ss.O)
        lo, hi = min(lo, w[0]), max(hi, w[-1])
    ok = res <= 1e-10 and herm <= 1e-10 and lo >= -1e-8 and hi <= 1 + 1e-8
    return ok, f"Lyapunov residual {res:.2e}, O anti-Hermitian part {herm:.1e}, eig(O) in [{lo:.3g}, {hi:.6g}]"


def criterion_5():
    rng = np.random.default_rng(1005)
    worst = 0.0
    for L in (2, 3, 4):
        for _ in range(20):
            m = random_model(L, rng)
            _, O_ed = oracle.ed_steady_state(oracle.build_liouvillian_superoperator(m))
            worst = max(worst, float(np.abs(steady_state(m).O - O_ed).max()))
    return worst <= 1e-8, f"max |O - O_ed| {worst:.2e} over 60 models (tol 1e-8)"


def criterion_6():
    rng = np.random.default_rng(1006)
    worst = 0.0
    for L in (1, 2, 3):
        for _ in range(5):
            m = random_model(L, rng)
            pred = oracle.predicted_even_spectrum(rapidities(build_P(m)))
            ed = oracle.ed_spectrum(oracle.build_liouvillian_superoperator(m))
            worst = max(worst, match_multisets(pred, ed)[0])
    single = validate_model(ModelSpec([[0.0]], [[0.75]], [[0.25]]))
    ed1 = np.sort_complex(oracle.ed_spectrum(oracle.build_liouvillian_superoperator(single)))
    pred1 = np.sort_complex(oracle.predicted_even_spectrum(rapidities(build_P(single))))
    single_ok = (np.abs(ed1 - [-2, -1, -1, 0]).max() <= 1e-8
                 and np.abs(pred1 - [-2, 0]).max() <= 1e-8)
    ok = worst <= 1e-8 and single_ok
    return ok, f"max containment distance {worst:.2e}; L=1 {{0,-2}} in {{0,-1,-1,-2}}: {single_ok}"


def criterion_7():
    per_L = {}
    for L in (4, 10, 50, 200):
        per_L[L] = max(compare_analytic_numeric(XXChainParams(L=L, **p)) for p in XX_PARAMETER_SETS)
    worst = max(per_L.values())
    detail = ", ".join(f"L={L}: {d:.1e}" for L, d in per_L.items())
    return worst <= 1e-8, f"max analytic-vs-numeric deviation {detail} (tol 1e-8)"


def criterion_8():
    worst_n = worst_t = 0.0
    times = np.linspace(0.0, 5.0, 21)
    for lp, lm in [(0.75, 0.25), (0.1, 2.0), (1.3, 0.4), (0.0, 1.0), (5.0, 0.01)]:
        m = validate_model(ModelSpec([[0.37]], [[lp]], [[lm]]))
        nbar = lp / (lp + lm)
        worst_n = max(worst_n, abs(steady_state(m).occupations[0] - nbar))
        for n0 in (0.0, 0.4, 1.0):
            n = evolve_covariance(m, [[n0]], times).covariances[:, 0, 0].real
            ref = nbar + (n0 - nbar) * np.exp(-2 * (lp + lm) * times)
            worst_t = max(worst_t, float(np.abs(n - ref).max()))
    ok = worst_n <= 1e-12 and worst_t <= 1e-10
    return ok, f"occupation error {worst_n:.1e} (tol 1e-12), relaxation error {worst_t:.1e} (tol 1e-10)"


def criterion_9():
    rng = np.random.default_rng(1009)
    traj_err = 0.0
    ratios = []
    for L in (2, 3):
        for _ in range(3):
            m = random_model(L, rng)
            spec = rapidities(build_P(m))
            gap = spectral_gap(spec)
            S = oracle.build_liouvillian_superoperator(m)
            C0 = _random_gaussian_covariance(L, rng)
            times = np.linspace(0.0, 10.0 / gap, 41)
            ref = oracle.ed_evolve(S, oracle.gaussian_density_matrix(C0), times)
            res = evolve_covariance(m, C0, times, spec)
            traj_err = max(traj_err, float(np.abs(res.covariances - ref).max()))
            tail = times >= 5.0 / gap
            rate = tail_decay_rate(times[tail], ref[tail], oracle.ed_steady_state(S)[1])
            ratios.append(rate / gap)
    rate_err = max(abs(r - 1) for r in ratios)
    ok = traj_err <= 1e-6 and rate_err <= 0.05
    return ok, (f"trajectory error {traj_err:.1e} (tol 1e-6); tail rate / spectral_gap in "
                f"[{min(ratios):.3f}, {max(ratios):.3f}] (want 1 +- 0.05)")


def criterion_10():
    rng = np.random.default_rng(1010)
    worst = 0.0
    for L in (1, 2, 3):
        for _ in range(5):
            S = oracle.build_liouvillian_superoperator(random_model(L, rng))
            worst = max(worst, oracle.sector_coupling(S))
    return worst <= 1e-12, f"max even/odd coupling {worst:.1e} (tol 1e-12)"


def criterion_11():
    rng = np.random.default_rng(1011)
    log_err = diag_err = 0.0
    models = [validate_model(ModelSpec([[0.0]], [[0.75]], [[0.25]]))]
    models += [random_model(L, rng) for L in (1, 2, 4) for _ in range(5)]
    for m in models:
        spec = rapidities(build_P(m))
        asm = assemble_W1(spec, steady_state(m, spec).Q)
        W = similarity_log(asm.W1)
        log_err = max(log_err, max_norm(sla.expm(-W) - asm.W1))
        diag_err = max(diag_err, diagonalization_residual(asm, build_M(m), spec))
    ok = log_err <= 1e-8 and diag_err <= 1e-8
    return ok, f"exp round trip {log_err:.1e}, W1^-1 M W1 off-diagonal {diag_err:.1e} (tol 1e-8)"


def _best_time(model, repeats=7):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        full_solve(model)
        best = min(best, time.perf_counter() - t0)
    return best


def criterion_12():
    def chain(L):
        return build_xx_chain(XXChainParams(L=L, J=1.0, h_z=0.3, Gamma_1=1.0, Gamma_L=0.7,
                                            nbar_1=0.8, nbar_L=0.2))
    t128 = _best_time(chain(128))
    t512 = _best_time(chain(512), repeats=3)
    ratio = t512 / t128
    ok = t512 <= 60.0 and 64 / 3 <= ratio <= 64 * 3
    return ok, f"L=512 in {t512:.2f} s (limit 60 s); t512/t128 = {ratio:.1f} (want 21.3..192)"


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 13)}


def _line(n, ok, detail):
    return f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, capsys):
    ok, detail = CRITERIA[n]()
    with capsys.disabled():
        print("\n" + _line(n, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for n, fn in CRITERIA.items():
        ok, detail = fn()
        failed += not ok
        print(_line(n, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
