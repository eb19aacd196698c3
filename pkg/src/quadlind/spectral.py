"""Rapidities, the paired spectrum of M, and the normal-mode transformation W1."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.optimize import linear_sum_assignment

from .errors import IllConditionedError, NumericalError
from .model import ValidatedModel
from .structure import max_norm

COND_MAX = 1e8
TOL_GAP_REL = 1e-12


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Eigendecomposition ``P W_P = W_P diag(rapidities)``.

    Rapidities are sorted by imaginary part, ties broken by real part.
    Columns of ``W_P`` have unit norm and their first significant entry
    real and positive.
    """

    rapidities: np.ndarray
    W_P: np.ndarray
    condition_estimate: float
    degenerate_flags: np.ndarray
    P: np.ndarray | None = None

    @property
    def L(self) -> int:
        return self.rapidities.shape[0]

    @property
    def low_confidence(self) -> bool:
        """True near an exceptional point (ill-conditioned eigenbasis)."""
        return not self.condition_estimate <= COND_MAX

    @property
    def pair_sums(self) -> np.ndarray:
        """Matrix of ``lambda_i + conj(lambda_j)``."""
        lam = self.rapidities
        return lam[:, None] + lam.conj()[None, :]

    def residual(self) -> float:
        if self.P is None:
            raise ValueError("P not stored")
        return max_norm(self.P @ self.W_P - self.W_P * self.rapidities[None, :])


@dataclass(frozen=True, eq=False)
class W1Assembly:
    Q: np.ndarray
    C_mat: np.ndarray
    D_mat: np.ndarray
    W1: np.ndarray
    W1_inv: np.ndarray

    @property
    def W2(self) -> np.ndarray:
        """``(W1^T)^-1``, the transformation of the conjugate operator vector."""
        return self.W1_inv.T


def sort_key_order(values: np.ndarray) -> np.ndarray:
    """Indices ordering values by (Im, Re) ascending, robust to roundoff ties."""
    scale = max(1.0, float(np.abs(values).max(initial=0.0)))
    im = np.round(values.imag / scale, 10)
    return np.lexsort((values.real, im))


def fix_gauge(W: np.ndarray) -> np.ndarray:
    W = W / np.linalg.norm(W, axis=0, keepdims=True)
    for j in range(W.shape[1]):
        col = W[:, j]
        k = int(np.argmax(np.abs(col) > 1e-8 * np.abs(col).max()))
        W[:, j] = col * (abs(col[k]) / col[k])
    return W


def rapidities(P: np.ndarray, tol_gap_rel: float = TOL_GAP_REL) -> SpectralData:
    """Dense non-Hermitian eigendecomposition of P.

    Near-defective P is not an error: the result carries
    ``condition_estimate`` and ``low_confidence``.
    """
    P = np.asarray(P, dtype=complex)
    try:
        lam, W = sla.eig(P, check_finite=True)
    except (sla.LinAlgError, ValueError) as exc:
        raise NumericalError(f"eigensolver failed on P ({P.shape[0]}x{P.shape[0]}): {exc}") from exc
    order = sort_key_order(lam)
    lam = lam[order]
    W = fix_gauge(W[:, order])
    cond = float(np.linalg.cond(W)) if W.size else 1.0
    if not np.isfinite(cond):
        cond = np.inf
    sums = lam[:, None] + lam.conj()[None, :]
    tol = tol_gap_rel * max(float(np.abs(lam).max(initial=0.0)), np.finfo(float).tiny)
    flags = np.abs(sums) <= tol
    lam.setflags(write=False)
    W.setflags(write=False)
    return SpectralData(lam, W, cond, flags, P)


def spectral_data_for(model: ValidatedModel) -> SpectralData:
    from .structure import build_P
    return rapidities(build_P(model))


def full_spectrum(spectral: SpectralData) -> np.ndarray:
    """Eigenvalues of M: ``(lambda_1..lambda_L, -conj(lambda_1)..-conj(lambda_L))``."""
    lam = spectral.rapidities
    return np.concatenate([lam, -lam.conj()])


def match_multisets(a, b) -> tuple[float, np.ndarray, np.ndarray]:
    """Optimal one-to-one assignment of ``a`` into ``b`` (``len(a) <= len(b)``).

    Returns the max matched distance and the index arrays.
    """
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size == 0:
        return 0.0, np.array([], int), np.array([], int)
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    if r.size != a.size:
        raise ValueError("first multiset is larger than the second")
    return float(cost[r, c].max()), r, c


def pairing_deviation(spectral: SpectralData, M: np.ndarray) -> float:
    """Max distance between ``full_spectrum`` and a dense eigensolve of M."""
    return match_multisets(full_spectrum(spectral), sla.eigvals(M))[0]


def summing_rule_residual(spectral: SpectralData, model: ValidatedModel) -> float:
    """``|sum 2 Re(lambda) + tr(Lp + Lm^T)|``."""
    tr = np.trace(model.lambda_plus + model.lambda_minus.T).real
    return float(abs(2.0 * spectral.rapidities.real.sum() + tr))


def assemble_W1(spectral: SpectralData, Q: np.ndarray, cond_max: float = COND_MAX) -> W1Assembly:
    """Build ``W1 = [[W_P, W_P Q], [-W_P, -W_P Q - W_P^-dag]]`` and its block inverse.

    ``W1^-1 = [[-D^dag, C^dag], [-W_P^dag, -W_P^dag]]`` holds whenever Q is
    Hermitian, for any column normalization of W_P.
    """
    if spectral.condition_estimate > cond_max:
        raise IllConditionedError(
            f"eigenbasis ill-conditioned: cond(W_P) = {spectral.condition_estimate:.3e} > {cond_max:.1e}")
    W = spectral.W_P
    Q = np.asarray(Q, dtype=complex)
    C = W @ Q
    W_inv_dag = np.linalg.inv(W).conj().T
    D = -C - W_inv_dag
    W1 = np.block([[W, C], [-W, D]])
    Wd = W.conj().T
    W1_inv = np.block([[-D.conj().T, C.conj().T], [-Wd, -Wd]])
    return W1Assembly(Q, C, D, W1, W1_inv)


def diagonalization_residual(asm: W1Assembly, M: np.ndarray, spectral: SpectralData) -> float:
    """``max|W1^-1 M W1 - diag(full_spectrum)|``."""
    T = asm.W1_inv @ M @ asm.W1
    return max_norm(T - np.diag(full_spectrum(spectral)))


def similarity_log(W1: np.ndarray, on_branch_cut: str = "principal", tol: float = 1e-12) -> np.ndarray:
    """Return ``W = -log(W1)`` so that ``expm(-W) == W1``.

    The logarithm is taken eigenvalue-wise on the principal branch.
    Eigenvalues on the negative real axis get argument ``+pi`` by default;
    pass ``on_branch_cut="raise"`` to refuse them instead.
    """
    W1 = np.asarray(W1, dtype=complex)
    mu, V = sla.eig(W1)
    if np.any(np.abs(mu) <= tol * max(1.0, max_norm(W1))):
        raise NumericalError("W1 is singular; logarithm undefined")
    on_cut = (np.abs(mu.imag) <= tol * np.abs(mu)) & (mu.real < 0)
    if on_cut.any():
        if on_branch_cut == "raise":
            raise NumericalError(
                f"branch ambiguity: W1 has {int(on_cut.sum())} eigenvalue(s) on the negative real axis")
    logmu = np.log(np.abs(mu)) + 1j * np.where(on_cut, np.pi, np.angle(mu))
    if np.linalg.cond(V) > COND_MAX:
        # nearly defective: Schur-based fallback
        return -sla.logm(W1)
    return -(V * logmu[None, :]) @ np.linalg.inv(V)
