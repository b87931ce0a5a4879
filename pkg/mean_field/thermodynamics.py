"""
Free energy of the mean-field ferromagnet and the limits of its metastable branches.
"""
import logging

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .brillouin import brillouin, log_partition
from .constants import CONSTANTS
from .exceptions import DomainError
from .materials import critical_temperature, effective_field, reduced_coupling
from .solver import solve_converged

logger = logging.getLogger(__name__)

# y-grid used to trace the branch curve T(m); m = B_S(y) covers (0, 1) on it
_BRANCH_Y = np.geomspace(1e-5, 60.0, 2400)
_WINDOW_MARGIN = 1e-6


def _check_temperature(T):
    if not np.isfinite(T) or T <= 0:
        raise DomainError(f"free energy needs T > 0, got {T}")


def free_energy(model, T, B0, M):
    """
    F(M) = -k_B T ln Z(B_eff(M), T) + (λ/2) M^2 + (3λ'/4) M^4, joule per ion.

    Its stationary points in M are exactly the self-consistent magnetizations.
    ``M`` may be an array.
    """
    _check_temperature(T)
    M = np.asarray(M, dtype=float)
    y = model.g * CONSTANTS.mu_B * effective_field(model, M, B0) / (CONSTANTS.k_B * T)
    lam = model.mean_field_parameter
    energy = (
        -CONSTANTS.k_B * T * np.asarray(log_partition(model.spin, y))
        + 0.5 * lam * M ** 2
        + 0.75 * model.lambda_prime * M ** 4
    )
    return float(energy) if energy.ndim == 0 else energy


def free_energy_gradient(model, T, B0, M):
    """dF/dM = (λ + 3λ'M^2)(M - M_para(B_eff)), J/(J/T)."""
    _check_temperature(T)
    M = np.asarray(M, dtype=float)
    y = model.g * CONSTANTS.mu_B * effective_field(model, M, B0) / (CONSTANTS.k_B * T)
    paramagnetic = model.moment_scale * np.asarray(brillouin(model.spin, y))
    gradient = (model.mean_field_parameter + 3.0 * model.lambda_prime * M ** 2) * (M - paramagnetic)
    return float(gradient) if gradient.ndim == 0 else gradient


def first_order_threshold(spin):
    """
    Smallest reduced ratio λ'/λ for which the zero-field transition is
    discontinuous: (3/(S+1))^3 (S+1)(2S^2+2S+1)/90, the point where the cubic
    Landau coefficient changes sign.
    """
    cubic = (spin + 1.0) * (2.0 * spin ** 2 + 2.0 * spin + 1.0) / 90.0
    return (3.0 / (spin + 1.0)) ** 3 * cubic


def _branch_temperature(coupling, y):
    # temperature at which m = B_S(y) is self-consistent, on the field-aligned branch
    m = np.asarray(brillouin(coupling.spin, y))
    return (abs(coupling.h) + coupling.k1 * m + coupling.k3 * m ** 3) / y


def hysteresis_limits(model, B0=0.0):
    """
    (T_supercool, T_superheat) bounding the window where two stable branches
    coexist, or None when the transition at this field is continuous.

    The ordered branch is traced as T(m); its interior maximum is where the
    heated branch disappears, its interior minimum (or T_c as m -> 0+ at zero
    field) where the cooled branch does.
    """
    coupling = reduced_coupling(model, B0)
    temperatures = _branch_temperature(coupling, _BRANCH_Y)
    slope = np.diff(temperatures)
    maxima = np.flatnonzero((slope[:-1] > 0) & (slope[1:] <= 0)) + 1
    if maxima.size == 0:
        return None

    peak = int(maxima[0])
    superheat = _refine_extremum(coupling, peak, sign=-1.0)
    minima = np.flatnonzero((slope[:-1] < 0) & (slope[1:] >= 0)) + 1
    minima = minima[minima < peak]
    if minima.size:
        supercool = _refine_extremum(coupling, int(minima[-1]), sign=1.0)
    elif coupling.h == 0:
        supercool = critical_temperature(model)
    else:
        return None

    logger.debug(f"Hysteresis window at B0={B0} T: [{supercool:.6f}, {superheat:.6f}] K")
    return supercool, superheat


def _refine_extremum(coupling, index, sign):
    low, high = _BRANCH_Y[index - 1], _BRANCH_Y[index + 1]
    found = minimize_scalar(
        lambda y: sign * float(_branch_temperature(coupling, y)),
        bounds=(low, high),
        method='bounded',
        options={'xatol': 1e-12 * high},
    )
    return float(sign * found.fun)


def coexistence_temperature(model, B0=0.0):
    """
    Temperature inside the hysteresis window where the ordered and disordered
    branches have equal free energy. None when there is no window.
    """
    limits = hysteresis_limits(model, B0)
    if limits is None:
        return None
    supercool, superheat = limits
    low = supercool * (1.0 + _WINDOW_MARGIN)
    high = superheat * (1.0 - _WINDOW_MARGIN)

    def gap(T):
        ordered = _branch(model, T, B0, 1.0)
        disordered = _branch(model, T, B0, 0.0)
        return free_energy(model, T, B0, ordered.M) - free_energy(model, T, B0, disordered.M)

    g_low, g_high = gap(low), gap(high)
    if g_low * g_high > 0:
        logger.warning(f"Free energies do not cross inside [{low}, {high}] K at B0={B0} T")
        return None
    return float(brentq(gap, low, high, xtol=1e-10))


def _branch(model, T, B0, seed):
    sign = 1.0 if B0 >= 0 else -1.0
    return solve_converged(model, T, B0, sign * seed)
