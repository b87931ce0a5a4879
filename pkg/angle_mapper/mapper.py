"""
Writing thermal states into the register: pick pulse angles whose rotated
|00> reproduces the target populations, and certify the trace distance.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from mean_field.exceptions import DomainError
from mean_field.solver import solve_converged
from mean_field.sweeps import sweep_temperature
from quantum_state.metrics import trace_distance, zero_coherences
from quantum_state.rotations import rotate_matrix
from quantum_state.states import DensityMatrix, PulseAngles, thermal_density_matrix

from .exceptions import CertificationError, NotRepresentableError, RefinementFailedError

logger = logging.getLogger(__name__)

CERTIFICATION_THRESHOLD = 1e-3
PRODUCT_TOLERANCE = 1e-9
MIN_STEP = 1e-8
INITIAL_STEP = 0.25
MAX_EVALUATIONS = 4000

_GROUND = DensityMatrix.basis_projector('00').entries
_NEUTRAL_START = np.array([np.pi / 2, 0.0, np.pi / 2, 0.0])


@dataclass(frozen=True)
class AngleMapEntry:
    T: float
    B0: float
    m: float
    B_eff: float
    angles: PulseAngles
    achieved_D: float
    branch: str = 'single'
    method: str = 'analytic'

    def as_record(self):
        theta_x_a, theta_y_a, theta_x_b, theta_y_b = self.angles.as_array()
        return {
            'B0_T': self.B0,
            'T_K': self.T,
            'branch': self.branch,
            'm': self.m,
            'B_eff': self.B_eff,
            'theta_xA': theta_x_a,
            'theta_yA': theta_y_a,
            'theta_xB': theta_x_b,
            'theta_yB': theta_y_b,
            'trace_distance': self.achieved_D,
            'method': self.method,
        }


def target_state(model, T, B0, branch_seed=1.0):
    """Thermal state of the ferromagnet at (T, B0) on the branch reached from ``branch_seed``."""
    result = solve_converged(model, T, B0, branch_seed)
    return thermal_density_matrix(model, result.B_eff, T)


def invert_populations(populations):
    """
    Closed-form inverse of the rotated-|00> populations with θ_y = 0:
    c_A = 2(p00 + p01) - 1, c_B = 2(p00 + p10) - 1, θ_x = arccos(c).
    """
    p = np.asarray(populations, dtype=float)
    if p.shape != (4,) or not np.all(np.isfinite(p)):
        raise DomainError("expected four finite populations")
    if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
        raise DomainError(f"populations must be non-negative and sum to 1, got {p.tolist()}")

    mismatch = abs(p[0] * p[3] - p[1] * p[2])
    if mismatch >= PRODUCT_TOLERANCE:
        raise NotRepresentableError(f"populations are not a product state (|p00·p11 - p01·p10| = {mismatch:.3e})")

    c_a = np.clip(2.0 * (p[0] + p[1]) - 1.0, -1.0, 1.0)
    c_b = np.clip(2.0 * (p[0] + p[2]) - 1.0, -1.0, 1.0)
    return PulseAngles(float(np.arccos(c_a)), 0.0, float(np.arccos(c_b)), 0.0)


def _written(angles):
    return zero_coherences(rotate_matrix(_GROUND, angles))


def written_distance(angles, target):
    """D between the coherence-cancelled rotated |00> and ``target``."""
    return trace_distance(_written(angles), target)


def refine_numeric(initial, target):
    """
    Nelder-Mead on the four angles, starting from ``initial`` with a 0.25 rad
    simplex, until D < 1e-3 or the simplex shrinks below 1e-8 rad.
    """
    if not target.is_diagonal():
        raise DomainError("refinement targets must be diagonal")

    start = initial.as_array() if isinstance(initial, PulseAngles) else np.asarray(initial, dtype=float)
    distance = written_distance(start, target)
    if distance < CERTIFICATION_THRESHOLD:
        return PulseAngles.from_array(start, trace_distance=distance)

    def objective(x):
        return written_distance(x, target)

    def stop_when_certified(intermediate_result):
        if intermediate_result.fun < CERTIFICATION_THRESHOLD:
            raise StopIteration

    simplex = np.vstack([start, start + INITIAL_STEP * np.eye(4)])
    found = minimize(
        objective,
        start,
        method='Nelder-Mead',
        callback=stop_when_certified,
        options={
            'initial_simplex': simplex,
            'xatol': MIN_STEP,
            'fatol': 1e-15,
            'maxfev': MAX_EVALUATIONS,
        },
    )
    best = PulseAngles.from_array(found.x)
    distance = written_distance(best, target)
    logger.debug(f"Refinement finished after {found.nfev} evaluations with D={distance:.3e}")
    if distance >= CERTIFICATION_THRESHOLD:
        raise RefinementFailedError(
            f"refinement stalled at D={distance:.3e}", best_distance=distance, angles=best
        )
    return best.with_distance(distance)


def certify_entry(model, T, B0, result, branch='single'):
    """Angles for one solved point: analytic inverse, numeric refinement only if that misses."""
    target = thermal_density_matrix(model, result.B_eff, T)
    method = 'analytic'
    try:
        angles = invert_populations(target.populations)
        distance = written_distance(angles, target)
    except NotRepresentableError as exc:
        logger.info(f"T={T} K: {exc}; refining numerically")
        angles, distance = PulseAngles(*_NEUTRAL_START), np.inf

    if distance >= CERTIFICATION_THRESHOLD:
        method = 'numeric'
        try:
            angles = refine_numeric(angles, target)
        except RefinementFailedError as exc:
            raise CertificationError(
                f"cannot write the state at T={T} K: best D={exc.best_distance:.3e}",
                temperature=T,
                best_distance=exc.best_distance,
            ) from exc
        distance = angles.trace_distance

    return AngleMapEntry(
        T=float(T),
        B0=float(B0),
        m=result.m,
        B_eff=result.B_eff,
        angles=angles.with_distance(distance),
        achieved_D=float(distance),
        branch=branch,
        method=method,
    )


def build_angle_table(model, T_grid, B0=0.0, direction='up'):
    """One certified entry per temperature, in sweep order, following the branch of ``direction``."""
    sweep = sweep_temperature(model, T_grid, B0, direction)
    entries = [certify_entry(model, point.T, B0, point.result, branch=direction) for point in sweep.points]
    numeric = sum(entry.method == 'numeric' for entry in entries)
    logger.info(f"Angle table {direction} at B0={B0} T: {len(entries)} entries, {numeric} refined numerically")
    return entries
