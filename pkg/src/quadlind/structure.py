"""Derived matrices K, M, P of a quadratic fermionic Lindbladian.

    K = (-i h / hbar + Lp - Lm^T) / 2
    M = [[K, Lp], [Lm^T, -K^dag]]          (2L x 2L)
    P = K - Lp = (-i h / hbar - Lp - Lm^T) / 2

Only P is needed by the solver; M is materialized for verification.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .model import ValidatedModel


@dataclass(frozen=True, eq=False)
class StructureMatrices:
    K: np.ndarray
    M: np.ndarray
    P: np.ndarray


@dataclass(frozen=True, eq=False)
class PauliBlockConstants:
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray


def max_norm(a) -> float:
    return float(np.abs(a).max(initial=0.0))


def build_K(model: ValidatedModel) -> np.ndarray:
    return (-1j * model.h / model.hbar + model.lambda_plus - model.lambda_minus.T) / 2


def build_M(model: ValidatedModel) -> np.ndarray:
    K = build_K(model)
    return np.block([[K, model.lambda_plus],
                     [model.lambda_minus.T, -K.conj().T]])


def build_P(model: ValidatedModel, check: bool = True) -> np.ndarray:
    """Return P; with ``check`` assert ``P + P^dag = -(Lp + Lm^T)``."""
    P = (-1j * model.h / model.hbar - model.lambda_plus - model.lambda_minus.T) / 2
    if check:
        d = P + P.conj().T + model.lambda_plus + model.lambda_minus.T
        scale = max(1.0, max_norm(model.lambda_plus), max_norm(model.lambda_minus))
        assert max_norm(d) <= 1e-12 * scale, f"P + P^dag identity violated: {max_norm(d):.3e}"
    return P


def build_structure(model: ValidatedModel) -> StructureMatrices:
    return StructureMatrices(build_K(model), build_M(model), build_P(model))


@lru_cache(maxsize=32)
def _pauli_blocks(L: int) -> PauliBlockConstants:
    one = np.eye(L)
    zero = np.zeros((L, L))
    X = np.block([[zero, one], [one, zero]]).astype(complex)
    Y = -1j * np.block([[zero, one], [-one, zero]])
    Z = np.block([[one, zero], [zero, -one]]).astype(complex)
    for m in (X, Y, Z):
        m.setflags(write=False)
    return PauliBlockConstants(X, Y, Z)


def pauli_blocks(L: int) -> PauliBlockConstants:
    """``X_L, Y_L, Z_L``: Pauli matrices tensored with the L x L identity."""
    return _pauli_blocks(int(L))


def check_M_symmetry(M: np.ndarray) -> float:
    """Return ``max|Y M Y + M^dag|``; zero for every valid model."""
    n = M.shape[0]
    if n % 2:
        raise ValueError(f"M must have even dimension, got {n}")
    Y = pauli_blocks(n // 2).Y
    return max_norm(Y @ M @ Y + M.conj().T)
