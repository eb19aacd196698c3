"""Brute-force reference: the Liouvillian as a dense 4^L x 4^L matrix.

Fermion operators come from a Jordan-Wigner construction with site 1
string-free (leftmost tensor factor).  Occupation basis per site is
``|0> = (1, 0)``, ``|1> = (0, 1)``.  Density matrices are vectorized by
column stacking, so ``vec(A rho B) = (B^T kron A) vec(rho)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from .errors import MarginalSteadyStateError, OracleSizeError, ValidationError
from .model import ValidatedModel
from .spectral import SpectralData

L_MAX = 5
L_MAX_TRAJECTORY = 4

_SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)
_PARITY = np.diag([1.0, -1.0]).astype(complex)


@dataclass(frozen=True, eq=False)
class SuperOperator:
    matrix: np.ndarray
    L: int
    basis_convention: str = "column-stacking: vec(A rho B) = (B^T kron A) vec(rho)"

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@lru_cache(maxsize=8)
def _annihilators(L: int) -> tuple[np.ndarray, ...]:
    ops = []
    eye = np.eye(2, dtype=complex)
    for j in range(L):
        factors = [_PARITY] * j + [_SIGMA_MINUS] + [eye] * (L - j - 1)
        op = factors[0]
        for f in factors[1:]:
            op = np.kron(op, f)
        op.setflags(write=False)
        ops.append(op)
    return tuple(ops)


def annihilators(L: int) -> list[np.ndarray]:
    """Jordan-Wigner fermion annihilators ``a_1..a_L`` as 2^L x 2^L matrices."""
    return list(_annihilators(int(L)))


def quadratic_operator(coeffs: np.ndarray, ops: list[np.ndarray]) -> np.ndarray:
    """``sum_ij coeffs[i, j] a_i^dag a_j``."""
    d = ops[0].shape[0]
    out = np.zeros((d, d), dtype=complex)
    for i, ai in enumerate(ops):
        for j, aj in enumerate(ops):
            if coeffs[i, j] != 0:
                out += coeffs[i, j] * (ai.conj().T @ aj)
    return out


def _left(A, eye):
    return np.kron(eye, A)


def _right(B, eye):
    return np.kron(B.T, eye)


def _check_size(L: int, lmax: int) -> None:
    if L > lmax:
        dim = 4 ** L
        gib = dim * dim * 16 / 2 ** 30
        raise OracleSizeError(
            f"oracle refused for L={L} > L_max={lmax}: dense superoperator would be "
            f"{dim}x{dim} complex (~{gib:.1f} GiB)")


def build_liouvillian_superoperator(model: ValidatedModel, lmax: int = L_MAX) -> SuperOperator:
    """Assemble the Liouvillian matrix term by term.

    Each dissipator term ``X(rho)`` is added together with its Hermitian
    conjugate ``X(rho)^dag`` evaluated at Hermitian ``rho``.
    """
    L = model.L
    _check_size(L, lmax)
    a = annihilators(L)
    ad = [x.conj().T for x in a]
    d = 2 ** L
    eye = np.eye(d, dtype=complex)
    H = quadratic_operator(model.h, a)
    S = -1j / model.hbar * (_left(H, eye) - _right(H, eye))
    lp, lm = model.lambda_plus, model.lambda_minus
    for i in range(L):
        for j in range(L):
            g = lp[i, j]
            if g != 0:
                # Lp_ij (a_i^dag rho a_j - a_j a_i^dag rho)
                S += g * (np.kron(a[j].T, ad[i]) - _left(a[j] @ ad[i], eye))
                # h.c.: conj(Lp_ij) (a_j^dag rho a_i - rho a_i a_j^dag)
                S += np.conj(g) * (np.kron(a[i].T, ad[j]) - _right(a[i] @ ad[j], eye))
            g = lm[i, j]
            if g != 0:
                # Lm_ij (a_i rho a_j^dag - a_j^dag a_i rho)
                S += g * (np.kron(ad[j].T, a[i]) - _left(ad[j] @ a[i], eye))
                # h.c.: conj(Lm_ij) (a_j rho a_i^dag - rho a_i^dag a_j)
                S += np.conj(g) * (np.kron(ad[i].T, a[j]) - _right(ad[i] @ a[j], eye))
    return SuperOperator(S, L)


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(v.shape[0])))
    return np.asarray(v).reshape((d, d), order="F")


def two_point(rho: np.ndarray, L: int) -> np.ndarray:
    """``O[i, j] = tr(rho a_i^dag a_j)``."""
    a = annihilators(L)
    O = np.empty((L, L), dtype=complex)
    for i in range(L):
        for j in range(L):
            O[i, j] = np.trace(rho @ a[i].conj().T @ a[j])
    return O


def trace_residual(superop: SuperOperator) -> float:
    """``max |vec(1)^dag S|``: trace preservation."""
    one = vec(np.eye(2 ** superop.L))
    return float(np.abs(one.conj() @ superop.matrix).max())


def hermiticity_residual(superop: SuperOperator, rng=None) -> float:
    """Apply S to a random Hermitian operator and measure the anti-Hermitian part."""
    rng = np.random.default_rng(rng)
    d = 2 ** superop.L
    x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    x = x + x.conj().T
    y = unvec(superop.matrix @ vec(x))
    return float(np.abs(y - y.conj().T).max())


def parity_grading(L: int) -> np.ndarray:
    """Parity of ``sum_i (n_i + n'_i)`` for each vectorized basis element ``|n><n'|``."""
    d = 2 ** L
    pop = np.array([bin(k).count("1") for k in range(d)])
    # column stacking: index = row + d * col
    return (pop[:, None] + pop[None, :]).reshape(-1, order="F") % 2


def sector_coupling(superop: SuperOperator) -> float:
    """Largest matrix element between the even and odd parity sectors."""
    par = parity_grading(superop.L)
    off = par[:, None] != par[None, :]
    return float(np.abs(superop.matrix[off]).max(initial=0.0))


def ed_spectrum(superop: SuperOperator) -> np.ndarray:
    return sla.eigvals(superop.matrix)


def ed_steady_state(superop: SuperOperator, tol_gap: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Null vector of the Liouvillian as a normalized density matrix, and its two-point matrix.

    Raises `MarginalSteadyStateError` if a second eigenvalue has real part
    within ``tol_gap`` of zero.
    """
    w, V = sla.eig(superop.matrix)
    order = np.argsort(np.abs(w))
    w, V = w[order], V[:, order]
    if len(w) > 1 and abs(w[1].real) <= tol_gap:
        raise MarginalSteadyStateError(
            f"non-unique steady state: second Liouvillian eigenvalue {w[1]:.3e} has |Re| <= {tol_gap:.1e}")
    rho = unvec(V[:, 0])
    rho = rho / np.trace(rho)
    rho = (rho + rho.conj().T) / 2
    return rho, two_point(rho, superop.L)


def predicted_even_spectrum(spectral: SpectralData) -> np.ndarray:
    """All ``sum_i 2 lambda_i nu_i + 2 conj(lambda_i) nu'_i`` with even ``sum(nu + nu')``."""
    lam = np.asarray(spectral.rapidities)
    L = lam.shape[0]
    out = []
    for bits in itertools.product((0, 1), repeat=2 * L):
        if sum(bits) % 2:
            continue
        nu = np.array(bits[:L])
        nup = np.array(bits[L:])
        out.append(2 * (lam @ nu) + 2 * (lam.conj() @ nup))
    return np.array(out)


def gaussian_density_matrix(C: np.ndarray) -> np.ndarray:
    """Gaussian (number-conserving) state with ``tr(rho a_i^dag a_j) = C[i, j]``.

    Built as a product over the eigenmodes of ``conj(C)``, so pure states
    (occupations exactly 0 or 1) are allowed.
    """
    C = np.asarray(C, dtype=complex)
    L = C.shape[0]
    f, V = np.linalg.eigh(C.conj())
    if f[0] < -1e-12 or f[-1] > 1 + 1e-12:
        raise ValidationError(f"covariance spectrum outside [0, 1]: [{f[0]:.3e}, {f[-1]:.6g}]")
    f = np.clip(f, 0.0, 1.0)
    a = annihilators(L)
    d = 2 ** L
    eye = np.eye(d, dtype=complex)
    rho = eye.copy()
    for k in range(L):
        # n_k = d_k^dag d_k with d_k^dag = sum_i V[i, k] a_i^dag
        coeff = np.outer(V[:, k], V[:, k].conj())
        n_k = quadratic_operator(coeff, a)
        rho = rho @ (f[k] * n_k + (1 - f[k]) * (eye - n_k))
    return (rho + rho.conj().T) / 2


def ed_evolve(superop: SuperOperator, rho0: np.ndarray, times, lmax: int = L_MAX_TRAJECTORY) -> np.ndarray:
    """Two-point matrices ``O(t)`` of ``exp(S t) rho0`` at each time, shape ``(T, L, L)``."""
    _check_size(superop.L, lmax)
    v0 = vec(rho0)
    out = []
    for t in np.asarray(times, dtype=float):
        rho = unvec(sla.expm(superop.matrix * t) @ v0)
        out.append(two_point(rho, superop.L))
    return np.array(out)
