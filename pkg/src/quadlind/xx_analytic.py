"""Closed-form rapidities of the boundary-driven XX chain.

Under ``J**2 == hbar**2 * Gamma_1 * Gamma_L`` the rapidities are

    hbar * lambda_k = -J sin(a_k) sinh(b_k) - i (h_z + J cos(a_k) cosh(b_k))
    a_k = k pi / L,   k = 1 .. L-1
    b_k = ln((1 + s_k) / (1 - s_k)) / (2 L),   s_k = 2 sqrt(kappa) sin(a_k) / (kappa + 1)

with ``kappa = (J / (hbar Gamma_1))**2``.  The L-th value is completed from
``tr(P) = -i L h_z / hbar - (Gamma_1 + Gamma_L) / 2``.

These expressions are the long-chain asymptotics of the bordered Toeplitz
eigenproblem: at finite L they differ from the exact eigenvalues by
O(1/L**2).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ClosedFormError
from .model import XXChainParams, build_xx_chain
from .spectral import rapidities
from .structure import build_P

TOL_CONDITION = 1e-12


@dataclass(frozen=True, eq=False)
class AnalyticSpectrum:
    kappa: float
    alphas: np.ndarray
    betas: np.ndarray
    lambdas: np.ndarray
    condition_satisfied: bool


def check_condition(params: XXChainParams) -> bool:
    """True iff ``J**2 == hbar**2 Gamma_1 Gamma_L`` to relative 1e-12."""
    a = params.J ** 2
    b = params.hbar ** 2 * params.Gamma_1 * params.Gamma_L
    return abs(a - b) <= TOL_CONDITION * max(a, b)


def trace_P(params: XXChainParams) -> complex:
    return -1j * params.L * params.h_z / params.hbar - (params.Gamma_1 + params.Gamma_L) / 2


def analytic_rapidities(params: XXChainParams) -> AnalyticSpectrum:
    if not check_condition(params) or params.J == 0:
        raise ClosedFormError(
            f"closed form inapplicable: J^2 = {params.J ** 2:.6g} but "
            f"hbar^2 Gamma_1 Gamma_L = {params.hbar ** 2 * params.Gamma_1 * params.Gamma_L:.6g}")
    L, J, hbar = params.L, params.J, params.hbar
    kappa = (J / (hbar * params.Gamma_1)) ** 2
    k = np.arange(1, L)
    alphas = k * np.pi / L
    s = 2 * np.sqrt(kappa) / (kappa + 1) * np.sin(alphas)
    if np.any(s >= 1 - 1e-12):
        bad = int(k[np.argmax(s)])
        raise ClosedFormError(
            f"divergent-beta edge case: 2 sqrt(kappa) sin(k pi/L)/(kappa+1) >= 1 at k={bad} "
            f"(kappa={kappa:.6g}, L={L})")
    betas = np.log((1 + s) / (1 - s)) / (2 * L)
    lam = (-J * np.sin(alphas) * np.sinh(betas)
           - 1j * (params.h_z + J * np.cos(alphas) * np.cosh(betas))) / hbar
    lam_last = trace_P(params) - lam.sum()
    lambdas = np.append(lam, lam_last)
    return AnalyticSpectrum(kappa, alphas, betas, lambdas, True)


def match_greedy(a, b) -> tuple[float, np.ndarray]:
    """Greedy nearest-neighbour matching of multiset ``a`` onto ``b``.

    Pairs are taken in order of increasing distance and each element is
    used once.  Returns the max matched distance and, for each entry of
    ``a``, the index of its partner in ``b``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError("multisets differ in size")
    n = a.size
    dist = np.abs(a[:, None] - b[None, :])
    flat = np.argsort(dist, axis=None, kind="stable")
    used_a = np.zeros(n, bool)
    used_b = np.zeros(n, bool)
    partner = np.full(n, -1)
    worst = 0.0
    for idx in flat:
        i, j = divmod(int(idx), n)
        if used_a[i] or used_b[j]:
            continue
        used_a[i] = used_b[j] = True
        partner[i] = j
        worst = max(worst, float(dist[i, j]))
        if used_a.all():
            break
    if len(set(partner.tolist())) != n:
        raise RuntimeError("matching collision")
    return worst, partner


def compare_analytic_numeric(params: XXChainParams) -> float:
    """Max ``|lambda_analytic - lambda_numeric|`` after multiset matching."""
    analytic = analytic_rapidities(params)
    numeric = rapidities(build_P(build_xx_chain(params))).rapidities
    return match_greedy(analytic.lambdas, numeric)[0]
