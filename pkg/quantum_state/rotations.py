"""
Single-qubit pulses on the two-qubit register and their closed-form action on |00>.
"""
import numpy as np

from mean_field.exceptions import DomainError

from .states import DensityMatrix, PseudoPureState, PulseAngles

_IDENTITY = np.eye(2, dtype=complex)
_PAULI = {
    'x': np.array([[0, 1], [1, 0]], dtype=complex),
    'y': np.array([[0, -1j], [1j, 0]], dtype=complex),
}


def rotation_operator(axis, qubit, theta):
    """exp(-i θ σ_axis / 2) on ``qubit`` (A is the first tensor factor), identity on the other."""
    if axis not in _PAULI:
        raise DomainError(f"axis must be 'x' or 'y', got {axis!r}")
    if qubit not in ('A', 'B'):
        raise DomainError(f"qubit must be 'A' or 'B', got {qubit!r}")
    single = np.cos(theta / 2.0) * _IDENTITY - 1j * np.sin(theta / 2.0) * _PAULI[axis]
    if qubit == 'A':
        return np.kron(single, _IDENTITY)
    return np.kron(_IDENTITY, single)


def _angles_array(angles):
    if isinstance(angles, PulseAngles):
        return angles.as_array()
    values = np.asarray(angles, dtype=float)
    if values.shape != (4,):
        raise DomainError(f"expected four angles (θx_A, θy_A, θx_B, θy_B), got shape {values.shape}")
    return values


def pulse_unitary(angles):
    """U = R_x^A R_x^B R_y^A R_y^B: the y pulses act first."""
    x_a, y_a, x_b, y_b = _angles_array(angles)
    return (
        rotation_operator('x', 'A', x_a)
        @ rotation_operator('x', 'B', x_b)
        @ rotation_operator('y', 'A', y_a)
        @ rotation_operator('y', 'B', y_b)
    )


def rotate_matrix(matrix, angles):
    unitary = pulse_unitary(angles)
    return unitary @ matrix @ unitary.conj().T


def apply_rotations(state, angles):
    """U ρ U^† = (1 - ε)/4 I + ε U ρ1 U^†: only the pure part moves."""
    rotated = rotate_matrix(state.rho1.entries, angles)
    # re-symmetrize to keep rounding from breaking Hermiticity checks
    rotated = 0.5 * (rotated + rotated.conj().T)
    return PseudoPureState(state.epsilon, DensityMatrix(rotated))


def populations_from_angles(angles):
    """
    Diagonal of U|00><00|U^†:
    ρ00 = (1 + c_A)(1 + c_B)/4 with c = cos θx cos θy per qubit, and so on.
    Accepts PulseAngles or any four angles (negative ones included).
    """
    x_a, y_a, x_b, y_b = _angles_array(angles)
    c_a = np.cos(x_a) * np.cos(y_a)
    c_b = np.cos(x_b) * np.cos(y_b)
    return 0.25 * np.array([
        (1.0 + c_a) * (1.0 + c_b),
        (1.0 + c_a) * (1.0 - c_b),
        (1.0 - c_a) * (1.0 + c_b),
        (1.0 - c_a) * (1.0 - c_b),
    ])
