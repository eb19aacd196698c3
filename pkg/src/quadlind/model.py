"""Quadratic fermionic Lindblad models.

A model is the triple ``(h, lambda_plus, lambda_minus)`` plus ``hbar``:

    H = sum_mn h[m, n] a_m^dag a_n
    D(rho) = sum_ij Lp[i, j] (a_i^dag rho a_j - a_j a_i^dag rho)
           + Lm[i, j] (a_i rho a_j^dag - a_j^dag a_i rho) + h.c.

`validate_model` certifies Hermiticity and positivity and returns an
immutable `ValidatedModel`.  `build_xx_chain` produces the Jordan-Wigner
image of the boundary-driven XX spin chain.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

TOL_HERMITIAN = 1e-10
TOL_PSD = 1e-10


@dataclass
class ModelSpec:
    """Unvalidated model description. Matrices may be any array-like."""

    h: np.ndarray
    lambda_plus: np.ndarray
    lambda_minus: np.ndarray
    hbar: float = 1.0
    L: int | None = None


@dataclass(frozen=True, eq=False)
class ValidatedModel:
    """Immutable, certified model. Arrays are complex and read-only."""

    h: np.ndarray
    lambda_plus: np.ndarray
    lambda_minus: np.ndarray
    hbar: float = 1.0
    # populated for chains built by build_xx_chain
    xx: "XXChainParams | None" = None

    @property
    def L(self) -> int:
        return self.h.shape[0]


@dataclass(frozen=True)
class XXChainParams:
    L: int
    J: float = 1.0
    h_z: float = 0.0
    Gamma_1: float = 1.0
    Gamma_L: float = 1.0
    nbar_1: float = 0.5
    nbar_L: float = 0.5
    hbar: float = 1.0

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 1:
            raise ValidationError(f"L must be a positive integer, got {self.L!r}")
        if self.Gamma_1 < 0 or self.Gamma_L < 0:
            raise ValidationError(
                f"boundary rates must be nonnegative (Gamma_1={self.Gamma_1}, "
                f"Gamma_L={self.Gamma_L})")
        for name in ("nbar_1", "nbar_L"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {v}")
        if not self.hbar > 0:
            raise ValidationError(f"hbar must be positive, got {self.hbar}")

    def replace(self, **changes) -> "XXChainParams":
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d.update(changes)
        return XXChainParams(**d)


def _as_square(name: str, a, L: int | None) -> np.ndarray:
    m = np.array(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {m.shape}")
    if L is not None and m.shape[0] != L:
        raise ValidationError(
            f"dimension mismatch: {name} is {m.shape[0]}x{m.shape[1]}, expected L={L}")
    return m


def _scale(m: np.ndarray) -> float:
    return max(1.0, float(np.abs(m).max(initial=0.0)))


def hermiticity_violation(m: np.ndarray) -> float:
    return float(np.abs(m - m.conj().T).max(initial=0.0))


def validate_model(spec: ModelSpec, tol_hermitian: float = TOL_HERMITIAN,
                   tol_psd: float = TOL_PSD) -> ValidatedModel:
    """Check a raw `ModelSpec` and freeze it.

    Tolerances are relative to ``max(1, max|entry|)`` of each matrix.

    Raises
    ------
    ValidationError
        On dimension mismatch, non-Hermitian ``h`` or ``lambda_*``, or a
        ``lambda_*`` eigenvalue below ``-tol_psd``.  The message names the
        offending matrix and the measured violation.
    """
    if isinstance(spec, ValidatedModel):
        return spec
    L = spec.L
    if L is not None and (int(L) != L or L < 1):
        raise ValidationError(f"L must be a positive integer, got {L!r}")
    h = _as_square("h", spec.h, L)
    L = h.shape[0]
    lp = _as_square("lambda_plus", spec.lambda_plus, L)
    lm = _as_square("lambda_minus", spec.lambda_minus, L)
    if not (np.isfinite(h).all() and np.isfinite(lp).all() and np.isfinite(lm).all()):
        raise ValidationError("model matrices contain non-finite entries")
    hbar = float(spec.hbar)
    if not hbar > 0:
        raise ValidationError(f"hbar must be positive, got {spec.hbar}")

    for name, m in (("h", h), ("lambda_plus", lp), ("lambda_minus", lm)):
        v = hermiticity_violation(m)
        if v > tol_hermitian * _scale(m):
            raise ValidationError(f"{name} not Hermitian: max|m - m^dag| = {v:.3e}")
    for name, m in (("lambda_plus", lp), ("lambda_minus", lm)):
        w = np.linalg.eigvalsh((m + m.conj().T) / 2)
        if w[0] < -tol_psd * _scale(m):
            raise ValidationError(f"{name} not PSD: min eigenvalue = {w[0]:.3e}")

    arrays = []
    for m in (h, lp, lm):
        # project out the tolerated anti-Hermitian residue
        m = np.ascontiguousarray((m + m.conj().T) / 2)
        m.setflags(write=False)
        arrays.append(m)
    return ValidatedModel(*arrays, hbar=hbar)


def build_xx_chain(params: XXChainParams) -> ValidatedModel:
    """Fermionic model of the XX chain driven at sites 1 and L.

    ``h`` is tridiagonal with ``2 h_z`` on the diagonal and ``J`` on the
    first off-diagonals.  Gain and loss act on the two end sites only, with
    ``Lp = nbar * Gamma`` and ``Lm = (1 - nbar) * Gamma``.  For ``L == 1``
    both ends coincide and the rates add.
    """
    L = int(params.L)
    h = np.diag(np.full(L, 2.0 * params.h_z)).astype(complex)
    idx = np.arange(L - 1)
    h[idx, idx + 1] = params.J
    h[idx + 1, idx] = params.J
    lp = np.zeros((L, L), dtype=complex)
    lm = np.zeros((L, L), dtype=complex)
    lp[0, 0] += params.nbar_1 * params.Gamma_1
    lm[0, 0] += (1.0 - params.nbar_1) * params.Gamma_1
    lp[L - 1, L - 1] += params.nbar_L * params.Gamma_L
    lm[L - 1, L - 1] += (1.0 - params.nbar_L) * params.Gamma_L
    model = validate_model(ModelSpec(h, lp, lm, hbar=params.hbar))
    object.__setattr__(model, "xx", params)
    return model


def boundary_rates(model: ValidatedModel) -> tuple[float, float, float, float]:
    """Recover ``(Gamma_1, nbar_1, Gamma_L, nbar_L)`` from a chain model.

    ``nbar`` is returned as NaN at a closed end (``Gamma == 0``).
    """
    L = model.L
    if L == 1:
        raise ValidationError("boundary rates are ambiguous for L = 1")
    out = []
    for s in (0, L - 1):
        lp = model.lambda_plus[s, s].real
        g = lp + model.lambda_minus[s, s].real
        out += [g, lp / g if g > 0 else float("nan")]
    return tuple(out)


def random_model(L: int, rng: np.random.Generator | int | None = None,
                 hbar: float = 1.0) -> ValidatedModel:
    """Random valid model: Hermitian ``h`` and PSD ``Lp, Lm`` of the form A A^dag.

    Entries are scaled by ``1/sqrt(L)`` so norms stay O(1) as L grows.
    """
    rng = np.random.default_rng(rng)

    def cnormal():
        return (rng.standard_normal((L, L)) + 1j * rng.standard_normal((L, L))) / np.sqrt(2 * L)

    g = cnormal()
    h = g + g.conj().T
    a, b = cnormal(), cnormal()
    lp = a @ a.conj().T
    lm = b @ b.conj().T
    return validate_model(ModelSpec(h, lp, lm, hbar=hbar))
