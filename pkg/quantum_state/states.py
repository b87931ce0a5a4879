"""
Four-level states over the basis |00>, |01>, |10>, |11> in increasing energy.

For B > 0 the basis maps onto the spin-3/2 projections +3/2, +1/2, -1/2, -3/2.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import softmax

from mean_field.constants import CONSTANTS
from mean_field.exceptions import DomainError

from .linalg import jacobi_eigh

logger = logging.getLogger(__name__)

DIMENSION = 4
BASIS_LABELS = ('00', '01', '10', '11')
SPIN_PROJECTIONS = np.array([1.5, 0.5, -0.5, -1.5])
STATE_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    4x4 Hermitian, unit-trace, positive semi-definite matrix. Entries are
    stored as a read-only complex array.
    """
    entries: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.entries, dtype=complex)
        if matrix.shape != (DIMENSION, DIMENSION):
            raise DomainError(f"density matrix must be 4x4, got {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise DomainError("density matrix entries must be finite")
        if np.max(np.abs(matrix - matrix.conj().T)) > STATE_TOLERANCE:
            raise DomainError("density matrix is not Hermitian")
        if abs(np.trace(matrix) - 1.0) > STATE_TOLERANCE:
            raise DomainError(f"density matrix trace is {np.trace(matrix).real}, expected 1")

        off_diagonal = matrix - np.diag(np.diag(matrix))
        if np.any(off_diagonal):
            eigenvalues, _ = jacobi_eigh(matrix)
        else:
            eigenvalues = np.diag(matrix).real
        if np.min(eigenvalues) < -STATE_TOLERANCE:
            raise DomainError(f"density matrix has negative eigenvalue {np.min(eigenvalues):.3e}")

        matrix.flags.writeable = False
        object.__setattr__(self, 'entries', matrix)

    @classmethod
    def from_populations(cls, populations):
        return cls(np.diag(np.asarray(populations, dtype=float)))

    @classmethod
    def basis_projector(cls, label):
        index = BASIS_LABELS.index(label)
        return cls.from_populations(np.eye(DIMENSION)[index])

    @classmethod
    def maximally_mixed(cls):
        return cls(np.eye(DIMENSION) / DIMENSION)

    @property
    def populations(self):
        return np.diag(self.entries).real.copy()

    def is_diagonal(self, tol=STATE_TOLERANCE):
        return bool(np.max(np.abs(self.entries - np.diag(np.diag(self.entries)))) <= tol)

    def __repr__(self):
        return f"DensityMatrix(populations={np.round(self.populations, 6).tolist()})"


@dataclass(frozen=True)
class PseudoPureState:
    """(1 - ε)/4 I + ε ρ1; all dynamics act on ρ1 alone."""
    epsilon: float
    rho1: DensityMatrix

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 1.0:
            raise DomainError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if not isinstance(self.rho1, DensityMatrix):
            object.__setattr__(self, 'rho1', DensityMatrix(self.rho1))

    @classmethod
    def ground(cls, epsilon):
        return cls(epsilon, DensityMatrix.basis_projector('00'))

    def full_matrix(self):
        identity = np.eye(DIMENSION) / DIMENSION
        return DensityMatrix((1.0 - self.epsilon) * identity + self.epsilon * self.rho1.entries)


@dataclass(frozen=True)
class PulseAngles:
    """
    Rotation angles in radians, each in [0, pi]. ``trace_distance`` is the
    distance achieved by the written state when the angles were certified.
    """
    theta_x_A: float
    theta_y_A: float
    theta_x_B: float
    theta_y_B: float
    trace_distance: float | None = field(default=None, compare=False)

    def __post_init__(self):
        for name in ('theta_x_A', 'theta_y_A', 'theta_x_B', 'theta_y_B'):
            value = getattr(self, name)
            if not np.isfinite(value) or not -STATE_TOLERANCE <= value <= np.pi + STATE_TOLERANCE:
                raise DomainError(f"{name} must lie in [0, pi], got {value}")
            object.__setattr__(self, name, float(value))

    @classmethod
    def from_array(cls, values, trace_distance=None):
        """Fold arbitrary angles into [0, pi]; only cos(theta) is observable in the populations."""
        folded = np.arccos(np.clip(np.cos(np.asarray(values, dtype=float)), -1.0, 1.0))
        return cls(*folded.tolist(), trace_distance=trace_distance)

    def as_array(self):
        return np.array([self.theta_x_A, self.theta_y_A, self.theta_x_B, self.theta_y_B])

    def with_distance(self, distance):
        return PulseAngles(*self.as_array().tolist(), trace_distance=float(distance))


def thermal_density_matrix(model, B_eff, T):
    """
    Boltzmann populations p(m) ∝ exp(g μ_B B_eff m / k_B T) on the spin-3/2
    ladder; the ground state at T = 0 and I/4 at zero field.
    """
    if model.spin != 1.5:
        raise DomainError(f"the four-level register holds a spin 3/2 ladder, got S={model.spin}")
    if not np.isfinite(T) or T < 0:
        raise DomainError(f"temperature must be finite and >= 0, got {T}")
    if not np.isfinite(B_eff):
        raise DomainError(f"effective field must be finite, got {B_eff}")

    if B_eff == 0:
        return DensityMatrix.maximally_mixed()
    if T == 0:
        return DensityMatrix.basis_projector('00' if B_eff > 0 else '11')

    y = model.g * CONSTANTS.mu_B * B_eff / (CONSTANTS.k_B * T)
    return DensityMatrix.from_populations(softmax(y * SPIN_PROJECTIONS))
