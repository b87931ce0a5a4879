"""
The two writing experiments and the round-trip check they both rest on:
mean-field magnetization in, pulse angles, written state, magnetization out.
"""
import logging
from dataclasses import dataclass, field

from angle_mapper.mapper import certify_entry
from mean_field.exceptions import DomainError
from mean_field.materials import critical_temperature
from mean_field.solver import solve_converged
from mean_field.sweeps import hysteresis_width, sweep_temperature
from mean_field.thermodynamics import first_order_threshold
from quantum_state.metrics import magnetization_readout, zero_coherences
from quantum_state.rotations import apply_rotations
from quantum_state.states import PseudoPureState

from .exceptions import RoundTripError

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 1e-5
ROUND_TRIP_TOLERANCE = 1e-6

CURVE_COLUMNS = (
    'B0_T', 'T_K', 't_reduced', 'branch', 'm', 'M_si', 'B_eff', 'M_nmr', 'discrepancy',
    'theta_xA', 'theta_yA', 'theta_xB', 'theta_yB', 'trace_distance',
)


@dataclass(frozen=True)
class CurvePoint:
    T: float
    t_reduced: float
    B0: float
    m: float
    M_mean_field: float
    B_eff: float
    M_nmr: float
    discrepancy: float
    branch: str
    angles: object
    trace_distance: float

    def as_record(self):
        theta_x_a, theta_y_a, theta_x_b, theta_y_b = self.angles.as_array().tolist()
        values = (
            self.B0, self.T, self.t_reduced, self.branch, self.m, self.M_mean_field, self.B_eff,
            self.M_nmr, self.discrepancy, theta_x_a, theta_y_a, theta_x_b, theta_y_b, self.trace_distance,
        )
        return dict(zip(CURVE_COLUMNS, values))


@dataclass(frozen=True)
class HysteresisCurves:
    """Heating and cooling branches at one field, each in traversal order."""
    B0: float
    up: tuple
    down: tuple
    transitions_up: tuple = field(default_factory=tuple)
    transitions_down: tuple = field(default_factory=tuple)
    width: float = 0.0

    @property
    def has_hysteresis(self):
        return bool(self.transitions_up or self.transitions_down)

    def records(self):
        return [point.as_record() for point in self.up + self.down]


def read_back(model, angles, epsilon=DEFAULT_EPSILON):
    """
    Magnetization of the written register: rotate the |00> pseudo-pure state,
    average the coherences away and read the populations of ρ1. The identity
    background never moves, so ε does not enter the result.
    """
    written = apply_rotations(PseudoPureState.ground(epsilon), angles)
    return magnetization_readout(zero_coherences(written.rho1), model)


def _write_point(model, T, B0, result, branch, epsilon, t_c):
    entry = certify_entry(model, T, B0, result, branch=branch)
    M_nmr = read_back(model, entry.angles, epsilon)
    discrepancy = abs(result.M - M_nmr) / model.moment_scale
    if not discrepancy < ROUND_TRIP_TOLERANCE:
        raise RoundTripError(
            f"written state reads M={M_nmr:.6e} J/T at T={T} K, mean field gives {result.M:.6e} J/T",
            temperature=T,
            discrepancy=discrepancy,
        )
    return CurvePoint(
        T=float(T),
        t_reduced=float(T / t_c),
        B0=float(B0),
        m=result.m,
        M_mean_field=result.M,
        B_eff=result.B_eff,
        M_nmr=M_nmr,
        discrepancy=float(discrepancy),
        branch=branch,
        angles=entry.angles,
        trace_distance=entry.achieved_D,
    )


def roundtrip_magnetization(model, T, B0=0.0, branch_seed=1.0, epsilon=DEFAULT_EPSILON):
    """Write the thermal state at (T, B0) and compare what is read back with the mean-field M."""
    result = solve_converged(model, T, B0, branch_seed)
    return _write_point(model, T, B0, result, 'single', epsilon, critical_temperature(model))


def _write_sweep(model, sweep, branch, epsilon, t_c):
    return tuple(
        _write_point(model, point.T, sweep.B0, point.result, branch, epsilon, t_c)
        for point in sweep.points
    )


def run_second_order(model, T_grid, B0_list, epsilon=DEFAULT_EPSILON):
    """
    Magnetization curves of the λ' = 0 ferromagnet, one per field, written
    point by point into the register. Returns {B0: (CurvePoint, ...)}.
    """
    if model.is_first_order_model:
        raise DomainError("the second-order experiment needs λ' = 0")
    t_c = critical_temperature(model)
    curves = {}
    for B0 in B0_list:
        sweep = sweep_temperature(model, T_grid, B0, 'up')
        curves[float(B0)] = _write_sweep(model, sweep, 'single', epsilon, t_c)
        logger.info(f"Second-order curve at B0={B0} T: {len(sweep.points)} points written")
    return curves


def run_first_order(model, T_grid, B0_list, epsilon=DEFAULT_EPSILON):
    """Heating and cooling branches of the λ' != 0 ferromagnet for every field."""
    if not model.is_first_order_model:
        raise DomainError("the first-order experiment needs λ' != 0")
    threshold = first_order_threshold(model.spin)
    if model.lambda_prime_ratio <= threshold:
        logger.warning(
            f"λ'/λ = {model.lambda_prime_ratio:g} is below the first-order threshold {threshold:.4f}; "
            f"expect continuous branches"
        )
    t_c = critical_temperature(model)

    pairs = []
    for B0 in B0_list:
        up = sweep_temperature(model, T_grid, B0, 'up')
        down = sweep_temperature(model, T_grid, B0, 'down')
        curves = HysteresisCurves(
            B0=float(B0),
            up=_write_sweep(model, up, 'up', epsilon, t_c),
            down=_write_sweep(model, down, 'down', epsilon, t_c),
            transitions_up=up.transitions,
            transitions_down=down.transitions,
            width=hysteresis_width(up, down),
        )
        logger.info(f"Hysteresis at B0={B0} T: width {curves.width:.6f} K")
        pairs.append(curves)
    return pairs
