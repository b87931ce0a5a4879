"""
The ferromagnet being emulated and the closed-form quantities derived from it.
"""
import logging
from dataclasses import dataclass, replace

import numpy as np

from .brillouin import brillouin, check_spin
from .constants import CONSTANTS
from .exceptions import DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MaterialModel:
    """
    Mean-field ferromagnet: spin S, Landé g, neighbour count z, and exactly one
    coupling (exchange energy J_ex in joule, or λ directly in T/(J/T)).

    ``lambda_prime`` is the cubic coefficient in T/(J/T)^3; zero gives the
    second-order model, anything else the first-order one.
    """
    spin: float = 1.5
    g: float = 2.0
    z: int = 6
    j_ex: float | None = None
    lam: float | None = None
    lambda_prime: float = 0.0

    def __post_init__(self):
        check_spin(self.spin)
        if not self.g > 0:
            raise DomainError(f"Landé factor must be positive, got {self.g}")
        if int(self.z) != self.z or self.z < 1:
            raise DomainError(f"neighbour count must be an integer >= 1, got {self.z}")
        if (self.j_ex is None) == (self.lam is None):
            raise DomainError("exactly one of j_ex or lam must be given")
        if not np.isfinite(self.lambda_prime):
            raise DomainError("lambda_prime must be finite")

    @classmethod
    def from_critical_temperature(cls, t_c, spin=1.5, g=2.0, z=6, lambda_prime_ratio=0.0):
        """
        Calibrate J_ex so the printed T_c formula gives ``t_c``:
        J_ex = 3 k_B T_c / (2 (g-1)^2 z S(S+1)).
        """
        if not t_c > 0:
            raise DomainError(f"critical temperature must be positive, got {t_c}")
        if g == 1:
            raise DomainError("g = 1 carries no exchange coupling; give lam instead")
        j_ex = 3.0 * CONSTANTS.k_B * t_c / (2.0 * (g - 1.0) ** 2 * z * spin * (spin + 1.0))
        model = cls(spin=spin, g=g, z=z, j_ex=j_ex)
        return model.with_lambda_prime_ratio(lambda_prime_ratio)

    def with_lambda_prime_ratio(self, ratio):
        """
        Set λ' from the reduced ratio λ'/λ, measuring M in units of g·μ_B·S:
        λ' = ratio·λ / (g μ_B S)^2.
        """
        return replace(self, lambda_prime=ratio * self.mean_field_parameter / self.moment_scale ** 2)

    @property
    def mean_field_parameter(self):
        return self.lam if self.lam is not None else lambda_from_exchange(self)

    @property
    def moment_scale(self):
        """Saturation moment g·μ_B·S per ion, J/T."""
        return self.g * CONSTANTS.mu_B * self.spin

    @property
    def lambda_prime_ratio(self):
        lam = self.mean_field_parameter
        if lam == 0:
            return 0.0
        return self.lambda_prime * self.moment_scale ** 2 / lam

    @property
    def is_first_order_model(self):
        return self.lambda_prime != 0.0


def lambda_from_exchange(model):
    """λ = 2(g-1)^2 z J_ex / (g^2 μ_B^2)."""
    if model.j_ex is None:
        raise DomainError("model is parameterised by lam, not by an exchange energy")
    lam = 2.0 * (model.g - 1.0) ** 2 * model.z * model.j_ex / (model.g ** 2 * CONSTANTS.mu_B ** 2)
    if lam == 0.0:
        logger.warning(f"Degenerate material (g={model.g}, J_ex={model.j_ex}): no exchange coupling")
    return lam


def critical_temperature(model):
    """T_c = g^2 μ_B^2 S(S+1) λ / (3 k_B); the λ' term does not move it."""
    lam = model.mean_field_parameter
    if not lam > 0:
        raise DomainError(f"no magnetic ordering for λ = {lam}")
    return model.g ** 2 * CONSTANTS.mu_B ** 2 * model.spin * (model.spin + 1.0) * lam / (3.0 * CONSTANTS.k_B)


def effective_field(model, M, B0):
    """B0 + λM + λ'M^3, tesla."""
    M = np.asarray(M, dtype=float)
    field = B0 + model.mean_field_parameter * M + model.lambda_prime * M ** 3
    return float(field) if field.ndim == 0 else field


@dataclass(frozen=True)
class ReducedCoupling:
    """
    The self-consistency equation in reduced variables.

    With m = M/(g μ_B S) the Brillouin argument is y = (h + k1·m + k3·m^3)/T,
    where h, k1, k3 are kelvin: h = g μ_B B0/k_B, k1 = 3T_c/(S+1),
    k3 = k1·(λ'/λ in reduced units).
    """
    spin: float
    h: float
    k1: float
    k3: float

    def argument(self, m, temperature):
        return (self.h + self.k1 * m + self.k3 * m ** 3) / temperature

    def rhs(self, m, temperature):
        return brillouin(self.spin, self.argument(m, temperature))

    def field_sign(self, m):
        return np.sign(self.h + self.k1 * m + self.k3 * m ** 3)


def reduced_coupling(model, B0):
    scale = model.g * CONSTANTS.mu_B / CONSTANTS.k_B
    moment = model.moment_scale
    return ReducedCoupling(
        spin=model.spin,
        h=scale * B0,
        k1=scale * model.mean_field_parameter * moment,
        k3=scale * model.lambda_prime * moment ** 3,
    )
