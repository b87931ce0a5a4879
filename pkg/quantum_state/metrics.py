"""
Comparisons and read-outs on density matrices.
"""
import numpy as np

from mean_field.constants import CONSTANTS

from .linalg import jacobi_eigh
from .states import SPIN_PROJECTIONS, DensityMatrix


def _entries(state):
    return state.entries if isinstance(state, DensityMatrix) else np.asarray(state, dtype=complex)


def zero_coherences(rho):
    """Keep the diagonal only, as temporal averaging does."""
    return DensityMatrix(np.diag(np.diag(_entries(rho))))


def trace_distance(rho, sigma):
    """D = 1/2 tr|ρ - σ|, via the Jacobi eigenvalues of the Hermitian difference."""
    difference = _entries(rho) - _entries(sigma)
    eigenvalues, _ = jacobi_eigh(0.5 * (difference + difference.conj().T))
    return float(0.5 * np.sum(np.abs(eigenvalues)))


def magnetization_readout(rho, model):
    """M = g μ_B Σ p(m) m over the diagonal, J/T per ion."""
    populations = np.diag(_entries(rho)).real
    return float(model.g * CONSTANTS.mu_B * populations @ SPIN_PROJECTIONS)
