"""
Temperature sweeps with branch continuation, and the searches built on them.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, NotBracketedError
from .materials import reduced_coupling
from .solver import solve_converged

logger = logging.getLogger(__name__)

JUMP_THRESHOLD = 0.1
COOLING_SEED = 1e-3
CONFIRM_HALVINGS = 16

DIRECTIONS = ('up', 'down')


@dataclass(frozen=True)
class SweepPoint:
    T: float
    result: object
    branch_tag: str


@dataclass(frozen=True)
class Transition:
    T_jump: float
    delta_m: float


@dataclass(frozen=True)
class SweepResult:
    """One sweep direction: points in traversal order plus confirmed jumps."""
    direction: str
    B0: float
    points: tuple = field(default_factory=tuple)
    transitions: tuple = field(default_factory=tuple)

    @property
    def temperatures(self):
        return np.array([point.T for point in self.points])

    @property
    def magnetizations(self):
        return np.array([point.result.m for point in self.points])

    def ascending(self):
        """(T, m) arrays sorted by temperature, whichever way the sweep ran."""
        order = np.argsort(self.temperatures, kind='stable')
        return self.temperatures[order], self.magnetizations[order]

    @property
    def has_jump(self):
        return bool(self.transitions)


def _check_grid(T_grid):
    grid = np.asarray(T_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("temperature grid must be a non-empty list")
    if not np.all(np.isfinite(grid)) or np.any(grid < 0):
        raise DomainError("temperatures must be finite and >= 0")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("temperature grid must be strictly ascending")
    return grid


def _initial_guess(previous_m, direction, zero_field):
    # m = 0 is a fixed point at zero field; a small push lets cooling find the ordered branch
    if direction == 'down' and zero_field and previous_m >= 0:
        return max(previous_m, COOLING_SEED)
    return previous_m


def sweep_temperature(model, T_grid, B0=0.0, direction='up', seed=None):
    """
    Walk the grid in ``direction``, warm-starting every solve from the previous
    magnetization so metastable branches are followed until they vanish.

    Heating starts by default from the ordered state aligned with B0 (m = +1
    at zero field); cooling starts from the disordered m = 0.
    """
    if direction not in DIRECTIONS:
        raise DomainError(f"direction must be 'up' or 'down', got {direction!r}")
    grid = _check_grid(T_grid)
    if seed is None:
        aligned = 1.0 if B0 >= 0 else -1.0
        seed = aligned if direction == 'up' else 0.0
    if not abs(seed) <= 1.0:
        raise DomainError(f"seed must lie in [-1, 1], got {seed}")

    zero_field = reduced_coupling(model, B0).h == 0
    order = grid if direction == 'up' else grid[::-1]

    points, transitions = [], []
    previous = None
    for T in order:
        T = float(T)
        start = seed if previous is None else previous.result.m
        guess = _initial_guess(start, direction, zero_field)
        result = solve_converged(model, T, B0, guess)
        tag = 'continued' if previous is not None and guess == previous.result.m else 'reseeded'
        point = SweepPoint(T=T, result=result, branch_tag=tag)

        if previous is not None and abs(result.m - previous.result.m) > JUMP_THRESHOLD:
            transition = _confirm_transition(model, B0, direction, zero_field, previous, point)
            if transition is not None:
                logger.info(
                    f"Sweep {direction} at B0={B0} T: jump of {transition.delta_m:+.4f} near T={transition.T_jump:.6f} K"
                )
                transitions.append(transition)

        points.append(point)
        previous = point

    return SweepResult(direction=direction, B0=float(B0), points=tuple(points), transitions=tuple(transitions))


def _confirm_transition(model, B0, direction, zero_field, before, after):
    """
    Halve the interval between two grid points, continuing from the near side,
    until the jump is pinned or shrinks below the threshold.
    """
    t_near, m_near = before.T, before.result.m
    t_far, m_far = after.T, after.result.m
    for _ in range(CONFIRM_HALVINGS):
        t_mid = 0.5 * (t_near + t_far)
        mid = solve_converged(model, t_mid, B0, _initial_guess(m_near, direction, zero_field))
        if abs(mid.m - m_near) > JUMP_THRESHOLD:
            t_far, m_far = t_mid, mid.m
        else:
            t_near, m_near = t_mid, mid.m

    m_far = solve_converged(model, t_far, B0, _initial_guess(m_near, direction, zero_field)).m
    if abs(m_far - m_near) <= JUMP_THRESHOLD:
        logger.debug(f"Steep but continuous change between {before.T} K and {after.T} K")
        return None
    return Transition(T_jump=0.5 * (t_near + t_far), delta_m=m_far - m_near)


def hysteresis_width(up, down):
    """
    First heating jump minus first cooling jump, kelvin; 0 when either sweep
    is continuous. Positive when the heated branch outlives the cooled one.
    """
    if not up.transitions or not down.transitions:
        return 0.0
    return up.transitions[0].T_jump - down.transitions[0].T_jump


def find_critical_field(model, T_grid, B_grid):
    """
    Smallest field in ``B_grid`` at which neither sweep direction shows a jump.
    Resolution is the spacing of ``B_grid``.
    """
    fields = np.sort(np.asarray(B_grid, dtype=float))
    if fields.size == 0:
        raise DomainError("field grid must not be empty")
    grid = _check_grid(T_grid)

    if not model.is_first_order_model:
        logger.info("Second-order model has no jump at any field; returning the first grid field")
        return float(fields[0])

    for B in fields:
        B = float(B)
        if sweep_temperature(model, grid, B, 'up').has_jump:
            continue
        if sweep_temperature(model, grid, B, 'down').has_jump:
            continue
        logger.info(f"Critical field bracketed at B_c={B} T")
        return B

    raise NotBracketedError(f"magnetization jumps at every field up to {fields[-1]} T")
