"""Steady-state two-point functions from the Lyapunov equation.

The steady state solves ``P Omega + Omega P^dag = Lp`` and the observable
matrix ``O[i, j] = tr(rho a_i^dag a_j)`` is ``-Omega^T``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import MarginalSteadyStateError, NumericalError, ValidationError
from .model import ValidatedModel
from .spectral import TOL_GAP_REL, SpectralData, rapidities
from .structure import build_P, max_norm

TOL_OCCUPATION = 1e-8


@dataclass(frozen=True, eq=False)
class SteadyStateData:
    Omega: np.ndarray
    Q: np.ndarray
    O: np.ndarray
    occupations: np.ndarray
    currents: np.ndarray | None
    method: str = "spectral"


def check_gap(spectral: SpectralData, tol_gap_rel: float = TOL_GAP_REL) -> None:
    """Raise if some ``lambda_i + conj(lambda_j)`` is numerically zero."""
    sums = spectral.pair_sums
    if sums.size == 0:
        return
    tol = tol_gap_rel * max(float(np.abs(spectral.rapidities).max()), np.finfo(float).tiny)
    a = np.abs(sums)
    i, j = np.unravel_index(np.argmin(a), a.shape)
    if a[i, j] <= tol:
        raise MarginalSteadyStateError(
            f"non-unique or marginal steady state: |lambda_{i} + conj(lambda_{j})| = "
            f"{a[i, j]:.3e} <= {tol:.3e} (lambda_{i} = {spectral.rapidities[i]:.6g})")


def lyapunov_residual(P, Omega, lambda_plus) -> float:
    return max_norm(P @ Omega + Omega @ P.conj().T - lambda_plus)


def solve_lyapunov(P: np.ndarray, lambda_plus: np.ndarray, spectral: SpectralData | None = None,
                   tol_gap_rel: float = TOL_GAP_REL) -> tuple[np.ndarray, np.ndarray, str]:
    """Solve ``P Omega + Omega P^dag = Lp``.

    Uses the eigenbasis of P, ``Q_ij = (W^-1 Lp W^-dag)_ij / (lambda_i + conj(lambda_j))``
    and ``Omega = W Q W^dag``.  When the eigenbasis is ill-conditioned the
    Schur-based Bartels-Stewart solver is used instead and Q is recovered
    from Omega.

    Returns
    -------
    Omega, Q, method
    """
    P = np.asarray(P, dtype=complex)
    lp = np.asarray(lambda_plus, dtype=complex)
    if spectral is None:
        spectral = rapidities(P)
    check_gap(spectral, tol_gap_rel)
    W = spectral.W_P
    if spectral.low_confidence:
        Omega = sla.solve_continuous_lyapunov(P, lp)
        Omega = (Omega + Omega.conj().T) / 2
        # W is nearly singular here; Q is informational only
        X = np.linalg.solve(W, Omega)
        Q = np.linalg.solve(W, X.conj().T).conj().T
        return Omega, (Q + Q.conj().T) / 2, "schur"
    Winv = np.linalg.inv(W)
    rhs = Winv @ lp @ Winv.conj().T
    Q = rhs / spectral.pair_sums
    Q = (Q + Q.conj().T) / 2
    Omega = W @ Q @ W.conj().T
    Omega = (Omega + Omega.conj().T) / 2
    return Omega, Q, "spectral"


def observables(Omega: np.ndarray, tol: float = TOL_OCCUPATION) -> np.ndarray:
    """``O = -Omega^T``, checked to be Hermitian with spectrum in [0, 1]."""
    O = -np.asarray(Omega).T
    herm = max_norm(O - O.conj().T)
    if herm > 1e-10 * max(1.0, max_norm(O)):
        raise NumericalError(f"observable matrix not Hermitian: {herm:.3e}")
    w = np.linalg.eigvalsh((O + O.conj().T) / 2)
    if w.size and (w[0] < -tol or w[-1] > 1 + tol):
        raise NumericalError(
            f"occupation eigenvalues outside [0, 1]: min {w[0]:.3e}, max {w[-1]:.6g}; "
            "model/solver inconsistency")
    return O


def is_chain(h: np.ndarray) -> bool:
    L = h.shape[0]
    far = np.abs(np.triu(h, 2)).max(initial=0.0) + np.abs(np.tril(h, -2)).max(initial=0.0)
    return L >= 1 and far == 0.0


def particle_current(O: np.ndarray, model: ValidatedModel) -> np.ndarray:
    """Bond currents ``j_l = (2/hbar) Im(h[l+1, l] O[l+1, l])``, positive from l to l+1.

    Follows from the continuity equation ``dn_l/dt = j_{l-1} - j_l`` for a
    tridiagonal ``h``.
    """
    h = model.h
    if not is_chain(h):
        raise ValidationError("current undefined for non-chain model (h is not tridiagonal)")
    L = h.shape[0]
    l = np.arange(L - 1)
    return (2.0 / model.hbar) * np.imag(h[l + 1, l] * O[l + 1, l])


def steady_state(model: ValidatedModel, spectral: SpectralData | None = None,
                 tol_gap_rel: float = TOL_GAP_REL) -> SteadyStateData:
    P = build_P(model)
    if spectral is None:
        spectral = rapidities(P)
    Omega, Q, method = solve_lyapunov(P, model.lambda_plus, spectral, tol_gap_rel)
    O = observables(Omega)
    currents = particle_current(O, model) if is_chain(model.h) else None
    return SteadyStateData(Omega, Q, O, np.real(np.diag(O)).copy(), currents, method)

