"""Command-level computations shared by the CLI and the acceptance suite.

Every function returns a `Report`: a JSON-able ``data`` dict plus ``rows``
for tabular (CSV) output.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from . import oracle
from .dynamics import evolve_covariance, spectral_gap
from .errors import NumericalError
from .model import ValidatedModel, XXChainParams, build_xx_chain, random_model
from .spectral import (assemble_W1, diagonalization_residual, full_spectrum, match_multisets,
                       pairing_deviation, rapidities, similarity_log, summing_rule_residual)
from .steadystate import lyapunov_residual, steady_state
from .structure import build_M, build_P, check_M_symmetry, max_norm
from .xx_analytic import analytic_rapidities, match_greedy

PAIRING_TOL = 1e-10
SYMMETRY_TOL = 1e-12
SUMMING_TOL = 1e-10
LYAPUNOV_TOL = 1e-10
HERMITIAN_TOL = 1e-10
ORACLE_TOL = 1e-8
EVEN_SPECTRUM_TOL = 1e-8
SECTOR_TOL = 1e-12
TRACE_TOL = 1e-10
DIAG_TOL = 1e-8
LOG_TOL = 1e-8
TRAJECTORY_TOL = 1e-6


@dataclass
class Report:
    command: str
    data: dict
    rows: list = field(default_factory=list)
    ok: bool = True


def spectrum_report(model: ValidatedModel) -> Report:
    P = build_P(model)
    spec = rapidities(P)
    data = {
        "L": model.L,
        "rapidities": spec.rapidities,
        "full_spectrum": full_spectrum(spec),
        "condition_estimate": spec.condition_estimate,
        "low_confidence": spec.low_confidence,
        "eig_residual": spec.residual(),
        "summing_rule_residual": summing_rule_residual(spec, model),
    }
    try:
        data["gap"] = spectral_gap(spec)
    except NumericalError as exc:
        data["gap"] = None
        data["gap_error"] = str(exc)
    if model.L <= 256:
        M = build_M(model)
        data["pairing_deviation"] = pairing_deviation(spec, M)
        data["M_symmetry_residual"] = check_M_symmetry(M)
    rows = [{"index": i, "lambda": z} for i, z in enumerate(spec.rapidities)]
    return Report("spectrum", data, rows)


def steady_report(model: ValidatedModel) -> Report:
    P = build_P(model)
    spec = rapidities(P)
    ss = steady_state(model, spec)
    data = {
        "L": model.L,
        "method": ss.method,
        "occupations": ss.occupations,
        "currents": ss.currents,
        "O": ss.O,
        "lyapunov_residual": lyapunov_residual(P, ss.Omega, model.lambda_plus),
    }
    rows = []
    for i in range(model.L):
        row = {"site": i + 1, "occupation": float(ss.occupations[i])}
        if ss.currents is not None:
            row["current"] = float(ss.currents[i]) if i < model.L - 1 else None
        rows.append(row)
    return Report("steady", data, rows)


def evolve_report(model: ValidatedModel, C0, times) -> Report:
    res = evolve_covariance(model, C0, times)
    data = {"L": model.L, "gap": res.gap, "marginal": res.marginal, "times": res.times,
            "covariances": res.covariances}
    rows = []
    for t, C in zip(res.times, res.covariances):
        row = {"t": float(t)}
        for i in range(model.L):
            row[f"n_{i + 1}"] = float(C[i, i].real)
        rows.append(row)
    return Report("evolve", data, rows)


def xx_compare_report(params: XXChainParams) -> Report:
    analytic = analytic_rapidities(params)
    numeric = rapidities(build_P(build_xx_chain(params))).rapidities
    dev, partner = match_greedy(analytic.lambdas, numeric)
    rows = []
    for k, z in enumerate(analytic.lambdas):
        w = numeric[partner[k]]
        rows.append({"k": k + 1, "closed_form": k < params.L - 1, "lambda_analytic": z,
                     "lambda_numeric": w, "deviation": float(abs(z - w))})
    data = {"params": params.__dict__, "kappa": analytic.kappa, "max_deviation": dev,
            "lambdas_analytic": analytic.lambdas, "lambdas_numeric": numeric[partner]}
    return Report("xx-compare", data, rows)


def _random_gaussian_covariance(L: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((L, L)) + 1j * rng.standard_normal((L, L))
    U, _ = np.linalg.qr(z)
    return U @ np.diag(rng.uniform(0.0, 1.0, L)) @ U.conj().T


def verify_report(model: ValidatedModel, lmax: int = oracle.L_MAX, seed: int = 0) -> Report:
    """Run every structural and oracle cross-check on one model."""
    rng = np.random.default_rng(seed)
    checks = []

    def add(name, value, tol):
        checks.append({"check": name, "value": float(value), "threshold": tol,
                       "pass": bool(value <= tol)})

    P = build_P(model)
    M = build_M(model)
    spec = rapidities(P)
    add("pairing", pairing_deviation(spec, M), PAIRING_TOL)
    add("M_symmetry", check_M_symmetry(M), SYMMETRY_TOL)
    tr = float(np.trace(model.lambda_plus + model.lambda_minus.T).real)
    add("summing_rule", summing_rule_residual(spec, model), SUMMING_TOL * max(1.0, tr))
    ss = steady_state(model, spec)
    add("lyapunov", lyapunov_residual(P, ss.Omega, model.lambda_plus),
        LYAPUNOV_TOL * max(1.0, max_norm(model.lambda_plus)))
    add("O_hermitian", max_norm(ss.O - ss.O.conj().T), HERMITIAN_TOL)
    asm = assemble_W1(spec, ss.Q)
    add("W1_inverse", max_norm(asm.W1_inv @ asm.W1 - np.eye(2 * model.L)), 1e-9)
    add("W1_diagonalizes_M", diagonalization_residual(asm, M, spec), DIAG_TOL)
    W = similarity_log(asm.W1)
    add("log_round_trip", max_norm(sla.expm(-W) - asm.W1), LOG_TOL)

    if model.L <= lmax:
        S = oracle.build_liouvillian_superoperator(model, lmax=lmax)
        add("trace_preservation", oracle.trace_residual(S), TRACE_TOL)
        add("sector_decoupling", oracle.sector_coupling(S), SECTOR_TOL)
        _, O_ed = oracle.ed_steady_state(S)
        add("O_vs_oracle", max_norm(ss.O - O_ed), ORACLE_TOL)
        pred = oracle.predicted_even_spectrum(spec)
        add("even_spectrum_containment", match_multisets(pred, oracle.ed_spectrum(S))[0],
            EVEN_SPECTRUM_TOL)
        if model.L <= oracle.L_MAX_TRAJECTORY:
            C0 = _random_gaussian_covariance(model.L, rng)
            gap = spectral_gap(spec)
            times = np.linspace(0.0, 10.0 / gap, 11)
            traj = evolve_covariance(model, C0, times, spec).covariances
            ref = oracle.ed_evolve(S, oracle.gaussian_density_matrix(C0), times)
            add("trajectory_vs_oracle", np.abs(traj - ref).max(), TRAJECTORY_TOL)
    ok = all(c["pass"] for c in checks)
    return Report("verify", {"L": model.L, "seed": seed, "all_pass": ok, "checks": checks}, checks, ok)


def random_verify_report(L: int, seed: int, lmax: int = oracle.L_MAX) -> Report:
    model = random_model(L, seed)
    rep = verify_report(model, lmax=lmax, seed=seed)
    rep.data["model"] = "random"
    return rep


def full_solve(model: ValidatedModel):
    spec = rapidities(build_P(model))
    return spec, steady_state(model, spec)


def bench_report(sizes, repeats: int = 3) -> Report:
    """Wall time of rapidities plus steady state for XX chains of given sizes."""
    rows = []
    for L in sizes:
        params = XXChainParams(L=int(L), J=1.0, h_z=0.3, Gamma_1=1.0, Gamma_L=0.7,
                               nbar_1=0.8, nbar_L=0.2)
        model = build_xx_chain(params)
        best = np.inf
        for _ in range(repeats):
            t0 = time.perf_counter()
            full_solve(model)
            best = min(best, time.perf_counter() - t0)
        rows.append({"L": int(L), "seconds": best})
    data = {"rows": rows, "repeats": repeats}
    if len(rows) >= 2:
        x = np.log([r["L"] for r in rows])
        y = np.log([r["seconds"] for r in rows])
        data["fitted_exponent"] = float(np.polyfit(x, y, 1)[0])
    return Report("bench", data, rows)
