from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """
    CODATA values used by the emulator. Frozen so a run can never alter them.
    """
    mu_B: float = 9.2740100783e-24  # J/T, Bohr magneton
    k_B: float = 1.380649e-23  # J/K, Boltzmann constant

    def __post_init__(self):
        assert self.mu_B > 0, "mu_B must be positive"
        assert self.k_B > 0, "k_B must be positive"


CONSTANTS = PhysicalConstants()
