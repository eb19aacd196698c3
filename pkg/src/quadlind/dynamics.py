"""Closed-form evolution of the two-point matrix ``C[i, j] = <a_i^dag a_j>(t)``.

The transposed matrix ``X = C^T`` obeys

    dX/dt = 2 (P X + X P^dag + Lp)

whose fixed point ``X = -Omega`` reproduces the steady state.  In the
eigenbasis of P the deviation ``X - X_ss = W Y W^dag`` evolves entrywise as
``Y_ij(t) = Y_ij(0) exp(2 (lambda_i + conj(lambda_j)) t)``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import MarginalSteadyStateError, NumericalError, ValidationError
from .model import ValidatedModel
from .spectral import SpectralData, rapidities
from .steadystate import check_gap, solve_lyapunov
from .structure import build_P


@dataclass(frozen=True, eq=False)
class EvolutionResult:
    times: np.ndarray
    covariances: np.ndarray
    gap: float
    # set when the model has no unique steady state
    marginal: bool = False
    steady: np.ndarray | None = field(default=None, repr=False)


def spectral_gap(spectral: SpectralData, tol: float = 1e-12) -> float:
    """Slowest Liouvillian decay rate, ``2 min_i(-Re lambda_i)``."""
    lam = np.asarray(spectral.rapidities)
    g = 2.0 * float(np.min(-lam.real))
    scale = max(1.0, float(np.abs(lam).max(initial=0.0)))
    if not g > tol * scale:
        raise NumericalError(f"no gap / marginal: max Re(lambda) = {-g / 2:.3e}")
    return g


def covariance_generator(model: ValidatedModel):
    """Right-hand side ``dC/dt`` as a function of C (used for step-free checks)."""
    P = build_P(model)
    lp = model.lambda_plus

    def rhs(C):
        X = C.T
        return (2 * (P @ X + X @ P.conj().T + lp)).T

    return rhs


def evolve_covariance(model: ValidatedModel, C0, times, spectral: SpectralData | None = None) -> EvolutionResult:
    """Propagate C0 to each requested time without time stepping.

    For marginal models (some ``lambda_i + conj(lambda_j)`` ~ 0) finite-time
    evolution uses a dense matrix exponential of the vectorized generator
    and ``marginal`` is set on the result.
    """
    C0 = np.asarray(C0, dtype=complex)
    L = model.L
    if C0.shape != (L, L):
        raise ValidationError(f"C0 must be {L}x{L}, got {C0.shape}")
    if np.abs(C0 - C0.conj().T).max() > 1e-10:
        raise ValidationError("C0 must be Hermitian")
    w = np.linalg.eigvalsh((C0 + C0.conj().T) / 2)
    if w[0] < -1e-10 or w[-1] > 1 + 1e-10:
        raise ValidationError(f"C0 spectrum outside [0, 1]: [{w[0]:.3e}, {w[-1]:.6g}]")
    times = np.asarray(times, dtype=float).ravel()
    if np.any(times < 0):
        raise ValidationError("times must be nonnegative")

    P = build_P(model)
    if spectral is None:
        spectral = rapidities(P)
    try:
        check_gap(spectral)
        gap = spectral_gap(spectral)
    except (MarginalSteadyStateError, NumericalError):
        warnings.warn("marginal model: asymptotic behaviour is not defined", RuntimeWarning, stacklevel=2)
        return _evolve_dense(model, C0, times)

    Omega, _, _ = solve_lyapunov(P, model.lambda_plus, spectral)
    X_ss = -Omega
    W = spectral.W_P
    Winv = np.linalg.inv(W)
    Y0 = Winv @ (C0.T - X_ss) @ Winv.conj().T
    rates = 2.0 * spectral.pair_sums
    out = np.empty((times.size, L, L), dtype=complex)
    for k, t in enumerate(times):
        if t == 0.0:
            out[k] = C0
            continue
        X = W @ (Y0 * np.exp(rates * t)) @ W.conj().T + X_ss
        C = X.T
        out[k] = (C + C.conj().T) / 2
    return EvolutionResult(times, out, gap, False, X_ss.T)


def _evolve_dense(model: ValidatedModel, C0, times) -> EvolutionResult:
    L = model.L
    P = build_P(model)
    eye = np.eye(L)
    # vec(P X + X P^dag) with column stacking
    G = 2 * (np.kron(eye, P) + np.kron(P.conj(), eye))
    b = 2 * model.lambda_plus.reshape(-1, order="F")
    n = L * L
    # augmented system keeps the affine term exact
    A = np.zeros((n + 1, n + 1), dtype=complex)
    A[:n, :n] = G
    A[:n, n] = b
    x0 = np.append(C0.T.reshape(-1, order="F"), 1.0)
    out = np.empty((times.size, L, L), dtype=complex)
    for k, t in enumerate(times):
        if t == 0.0:
            out[k] = C0
            continue
        x = sla.expm(A * t) @ x0
        C = x[:n].reshape((L, L), order="F").T
        out[k] = (C + C.conj().T) / 2
    return EvolutionResult(times, out, 0.0, True, None)


def tail_decay_rate(times, covariances, steady) -> float:
    """Least-squares slope of ``-log max|C(t) - C_ss|`` over the given samples."""
    dev = np.array([np.abs(c - steady).max() for c in covariances])
    keep = dev > 0
    slope = np.polyfit(np.asarray(times)[keep], np.log(dev[keep]), 1)[0]
    return float(-slope)
