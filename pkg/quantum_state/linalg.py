"""
Cyclic complex Jacobi eigen-solver for small Hermitian matrices.
"""
import logging

import numpy as np

from mean_field.exceptions import DomainError

logger = logging.getLogger(__name__)

JACOBI_TOLERANCE = 1e-13
MAX_SWEEPS = 50


def _off_diagonal_norm(matrix):
    return float(np.sqrt(np.sum(np.abs(matrix - np.diag(np.diag(matrix))) ** 2)))


def jacobi_eigh(hermitian, tol=JACOBI_TOLERANCE, max_sweeps=MAX_SWEEPS):
    """
    Eigen-decomposition H = V diag(e) V^† by cyclic Jacobi sweeps.

    Each pivot (p, q) first rotates the phase of column q so that H[p, q] is
    real and non-negative, then applies the real plane rotation that zeroes it.
    Returns eigenvalues in ascending order and the unitary V whose columns are
    the matching eigenvectors.
    """
    matrix = np.array(hermitian, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise DomainError("matrix entries must be finite")
    if np.max(np.abs(matrix - matrix.conj().T), initial=0.0) > 1e-10 * max(1.0, np.max(np.abs(matrix))):
        raise DomainError("matrix is not Hermitian")

    size = matrix.shape[0]
    vectors = np.eye(size, dtype=complex)
    threshold = tol * max(1.0, float(np.linalg.norm(matrix)))

    for sweep in range(max_sweeps):
        if _off_diagonal_norm(matrix) < threshold:
            break
        for p in range(size - 1):
            for q in range(p + 1, size):
                element = matrix[p, q]
                magnitude = abs(element)
                if magnitude == 0.0:
                    continue
                phase = np.eye(size, dtype=complex)
                phase[q, q] = np.exp(-1j * np.angle(element))

                theta = 0.5 * np.arctan2(2.0 * magnitude, (matrix[q, q] - matrix[p, p]).real)
                c, s = np.cos(theta), np.sin(theta)
                rotation = np.eye(size, dtype=complex)
                rotation[p, p] = rotation[q, q] = c
                rotation[p, q] = s
                rotation[q, p] = -s

                step = phase @ rotation
                matrix = step.conj().T @ matrix @ step
                vectors = vectors @ step
    else:
        if _off_diagonal_norm(matrix) >= threshold:
            logger.warning(f"Jacobi stopped after {max_sweeps} sweeps, off-diagonal norm {_off_diagonal_norm(matrix):.3e}")

    eigenvalues = np.real(np.diag(matrix))
    order = np.argsort(eigenvalues, kind='stable')
    return eigenvalues[order], vectors[:, order]
