"""Quadratic fermionic Lindblad master equations via an L x L eigenproblem.

The Liouvillian of a number-conserving quadratic fermionic model reduces to
the non-Hermitian matrix ``P = (-i h/hbar - Lp - Lm^T) / 2``: its
eigenvalues are the rapidities, and the steady-state two-point matrix
follows from a Lyapunov equation in P.
"""
__version__ = "0.1.0"

from .errors import (ClosedFormError, IllConditionedError, MarginalSteadyStateError,
                     NumericalError, QuadlindError, ValidationError)
from .model import (ModelSpec, ValidatedModel, XXChainParams, build_xx_chain, random_model,
                    validate_model)
from .structure import build_K, build_M, build_P, check_M_symmetry, pauli_blocks
from .spectral import (SpectralData, W1Assembly, assemble_W1, full_spectrum, rapidities,
                       similarity_log, summing_rule_residual)
from .steadystate import SteadyStateData, observables, particle_current, solve_lyapunov, steady_state
from .dynamics import EvolutionResult, evolve_covariance, spectral_gap
from .xx_analytic import AnalyticSpectrum, analytic_rapidities, check_condition, compare_analytic_numeric
