"""
Self-consistent solution of m = B_S(y(m)) for one (T, B0) point.

All arithmetic runs on the reduced magnetization m = M/(g μ_B S); SI values
are attached only when the result is built.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .exceptions import ConvergenceError, DomainError
from .materials import effective_field, reduced_coupling

logger = logging.getLogger(__name__)

SOLVER_TOLERANCE = 1e-10
DAMPING = 0.5
MAX_ITERATIONS = 10_000

_STALL_WINDOW = 100
_SCAN_POINTS = 20_001
# At T = T_c the ordered root sinks into rounding noise; closer than this to 0 is the symmetric root
_PARAMAGNETIC_SNAP = 1e-6
_XTOL = 1e-15
_RTOL = 4 * np.finfo(float).eps


@dataclass(frozen=True)
class SelfConsistentResult:
    m: float
    M: float
    B_eff: float
    residual: float
    iterations: int
    converged: bool
    method: str = 'fixed_point'

    def as_dict(self):
        return {
            'm': self.m,
            'M': self.M,
            'B_eff': self.B_eff,
            'residual': self.residual,
            'iterations': self.iterations,
            'converged': self.converged,
            'method': self.method,
        }


def solve_self_consistent(model, T, B0, m_init=1.0):
    """
    Damped fixed-point iteration from ``m_init``; when it stalls, bisection on
    the first root of m - rhs(m) in the direction the iteration was moving.

    The damped map is order preserving, so both stages land on the same root:
    the stable solution whose basin contains ``m_init``. That is what lets a
    temperature sweep follow a metastable branch until it disappears.
    """
    if not np.isfinite(T) or T < 0:
        raise DomainError(f"temperature must be finite and >= 0, got {T}")
    if not np.isfinite(B0):
        raise DomainError(f"field must be finite, got {B0}")
    if not abs(m_init) <= 1.0:
        raise DomainError(f"initial magnetization must lie in [-1, 1], got {m_init}")

    coupling = reduced_coupling(model, B0)

    if T == 0:
        m = _saturate(coupling, m_init)
        return _build(model, B0, m, residual=0.0, iterations=0, method='saturation')

    m, iterations, method = _fixed_point(coupling, T, float(m_init))
    if coupling.h == 0 and abs(m) < _PARAMAGNETIC_SNAP:
        # m = 0 is an exact root at zero applied field
        m = 0.0
    residual = abs(m - coupling.rhs(m, T))
    result = _build(model, B0, m, residual, iterations, method)
    if not result.converged:
        logger.warning(f"Solve did not converge at T={T} K, B0={B0} T: residual {residual:.3e}")
    return result


def solve_converged(model, T, B0, m_init=1.0):
    """solve_self_consistent, raising ConvergenceError instead of returning an unconverged result."""
    result = solve_self_consistent(model, T, B0, m_init)
    if not result.converged:
        raise ConvergenceError(
            f"self-consistent solve did not converge at T={T} K (residual {result.residual:.3e})",
            temperature=T,
            residual=result.residual,
        )
    return result


def _build(model, B0, m, residual, iterations, method):
    M = m * model.moment_scale
    return SelfConsistentResult(
        m=float(m),
        M=float(M),
        B_eff=effective_field(model, M, B0),
        residual=float(residual),
        iterations=iterations,
        converged=bool(residual < SOLVER_TOLERANCE),
        method=method,
    )


def _saturate(coupling, m_init):
    # T = 0: the spin sits in the extreme projection along the field
    sign = coupling.field_sign(m_init) or np.sign(m_init)
    if sign == 0:
        return 0.0
    if coupling.field_sign(sign) == -sign:
        sign = -sign
    return float(sign)


def _fixed_point(coupling, T, m):
    gap = coupling.rhs(m, T) - m
    if gap == 0:
        return m, 0, 'fixed_point'

    window_start = abs(gap)
    for iteration in range(1, MAX_ITERATIONS + 1):
        m = m + DAMPING * gap
        gap = coupling.rhs(m, T) - m
        residual = abs(gap)
        if residual < SOLVER_TOLERANCE:
            return _polish(coupling, T, m, residual), iteration, 'fixed_point'

        if iteration % _STALL_WINDOW == 0:
            rate = (residual / window_start) ** (1.0 / _STALL_WINDOW)
            if rate >= 1.0:
                break
            needed = math.log(SOLVER_TOLERANCE / residual) / math.log(rate)
            if iteration + needed > MAX_ITERATIONS:
                break
            window_start = residual

    logger.debug(f"Fixed point stalled at T={T} K after {iteration} iterations, bisecting")
    return _bisect_basin(coupling, T, m), iteration, 'bisection'


def _bisect_basin(coupling, T, start):
    """First sign change of rhs(m) - m walking from ``start`` towards ±1."""
    def gap(x):
        return coupling.rhs(x, T) - x

    first = gap(start)
    if first == 0:
        return start
    # rhs(1) - 1 <= 0 and rhs(-1) + 1 >= 0, so the walk always finds a crossing
    end = 1.0 if first > 0 else -1.0
    grid = np.linspace(start, end, _SCAN_POINTS)
    values = coupling.rhs(grid, T) - grid
    crossed = np.flatnonzero(values <= 0) if first > 0 else np.flatnonzero(values >= 0)
    index = int(crossed[0])
    if values[index] == 0:
        return float(grid[index])
    return float(bisect(gap, grid[index - 1], grid[index], xtol=_XTOL, rtol=_RTOL))


def _polish(coupling, T, m, residual):
    """Tighten a converged iterate to machine precision so results do not depend on the path."""
    def gap(x):
        return coupling.rhs(x, T) - x

    width = max(8.0 * residual, 1e-13)
    for _ in range(40):
        low, high = max(m - width, -1.0), min(m + width, 1.0)
        g_low, g_high = gap(low), gap(high)
        if g_low == 0:
            return low
        if g_high == 0:
            return high
        if g_low * g_high < 0:
            return float(bisect(gap, low, high, xtol=_XTOL, rtol=_RTOL))
        width *= 2.0
        if low == -1.0 and high == 1.0:
            break
    return m
